import random
from fractions import Fraction

import mpmath
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmoment import type2
from cubicmoment.decompose import f_of, h_of, hankel_block
from cubicmoment.momentseq import CurveType, moment_matrix
from cubicmoment.oracle import forward_moments, random_instance
from cubicmoment.ratlinalg import QuadExt, ldl_psd, rank, schur, to_mpf

from conftest import delta, example
from test_hyperbola import squeeze_corner

F = Fraction
CURVE = CurveType.hyp2(-1)
TOL = mpmath.mpf("1e-25")


def instance(seed, k=3):
    rng = random.Random(seed)
    return random_instance(CURVE, k, rng.randint(0, 3), rng.randint(1, 7), seed, height=6)


# ---------------------------------------------------------------- region laws

def r1_samples(w, rng):
    """((t, u), in R1, expected Rank F(G) - Rank F(A_min)) triples."""
    eta = w.eta
    out = [((F(-1), F(1)), False, None)]
    if eta == 0:
        out.append(((F(0), F(0)), True, 0))
    for _ in range(3):
        t = F(rng.randint(1, 50), rng.randint(1, 50))
        e = F(1, rng.randint(1, 999))
        if eta != 0:
            u = eta * eta / t
            out += [((t, u), True, 1), ((t, u + e), True, 2), ((t, u - e * u), False, None)]
        else:
            out += [((t, F(0)), True, 1), ((F(0), t), True, 1), ((t, t), True, 2), ((t, -e), False, None)]
    return out


def r2_samples(w, rng):
    """((t, u), in R2, expected Rank H(G) - Rank H22) triples."""
    tm, um, k12 = w.t_max, w.u_max, w.k12
    out = []
    if k12 == 0:
        out.append(((tm, um), True, 0))
    for _ in range(3):
        s = F(rng.randint(1, 50), rng.randint(1, 50))
        e = F(1, rng.randint(1, 999))
        if k12 != 0:
            t, u = tm - s, um - k12 * k12 / s
            out += [((t, u), True, 1), ((t, u - e), True, 2), ((t, u + e), False, None)]
        else:
            out += [((tm - s, um), True, 1), ((tm, um - s), True, 1), ((tm - s, um - e), True, 2),
                    ((tm, um + e), False, None)]
        out.append(((tm + e, um - s), False, None))
    return out


def region_laws_hold(w, rng) -> bool:
    """Closed-form membership against an exact psd test, plus the rank-jump tables."""
    base_f = rank(f_of(w.d, w.a_min))
    for (t, u), member, inc in r1_samples(w, rng):
        rep = ldl_psd(f_of(w.d, type2.g_of(w, t, u)))
        if not (type2.in_r1(w, t, u) == member == rep.psd):
            return False
        if member and rep.rank != base_f + inc:
            return False
    base_h = rank(w.h22)
    for (t, u), member, inc in r2_samples(w, rng):
        rep = ldl_psd(h_of(w.d, type2.g_of(w, t, u)))
        if not (type2.in_r2(w, t, u) == member == rep.psd):
            return False
        if member and rep.rank != base_h + inc:
            return False
    return True


# ---------------------------------------------------------------- tests

def test_normalization_maps_atoms_onto_the_standard_curve():
    a = F(3, 2)
    pts = [(F(1), F(-1, 1 + a)), (F(2), F(-2, 1 + 2 * a)), (F(-1, 3), F(1, 3) / (1 - a / 3)), (F(5), F(0))]
    atoms = [(x, y, F(i + 1)) for i, (x, y) in enumerate(pts)]
    assert all(x + y + a * x * y == 0 or y == 0 for x, y, _w in atoms)
    mapped = [(-a * x, -a * y, w) for x, y, w in atoms]
    assert type2.normalize_type2(forward_moments(atoms, 3), a) == forward_moments(mapped, 3)
    assert type2.solve_type2(forward_moments(atoms, 3), a, construct=False).exists


def test_origin_atom_workspace():
    w = type2.build_workspace2(delta(0, 0))
    assert w.eta == 0
    assert w.K == [[1, 0], [0, 0]]
    r = type2.solve_type2(delta(0, 0))
    assert r.exists and r.minimal_atoms == 1


def test_worked_example_workspace():
    s = example("type2_example")[0]
    w = type2.build_workspace2(s)
    assert w.eta == F(-51255911, 6577059124404)
    assert w.k12 == F(-9, 55)
    assert w.t_max == F(1827880655851, 20096569546790)
    assert w.u_max == F(272763812083768883, 833444932244474880)
    f_min = f_of(w.d, w.a_min)
    assert rank(f_min) == 5 and type2.hyp_status(w.d, f_min) == "Hyp1"
    assert rank(h_of(w.d, w.a_min)) == 4


def test_worked_example_witness_matches_closed_form():
    s = example("type2_example")[0]
    r = type2.solve_type2(s, construct=False)
    assert r.exists and r.minimal_atoms == 9
    t, u = r.witness
    assert isinstance(t, QuadExt) and isinstance(u, QuadExt)
    with mpmath.workprec(320):
        root = mpmath.sqrt(127741799953693985969528905)
        u_ref = -49 * (-18583967869070689172740711 + 1644264781101 * root) / 55397740704244472768199800832
        t_ref = 49 * (18583967869070689172740711 + 1644264781101 * root) / 199331524341418907147142346748
        assert abs(to_mpf(t, 320) - t_ref) < mpmath.mpf("1e-80")
        assert abs(to_mpf(u, 320) - u_ref) < mpmath.mpf("1e-80")
    # the witness lies on both region boundaries
    w = type2.build_workspace2(s)
    assert t * u == w.eta ** 2
    assert (w.t_max - t) * (w.u_max - u) >= w.k12 ** 2


def test_k_differs_from_the_line_schur_complement_by_eta():
    s = example("type2_example")[0]
    w = type2.build_workspace2(s)
    h = h_of(w.d, w.a_min)
    order = [1, 2, 0, 3]
    comp = schur([[h[i][j] for j in order] for i in order], 2)
    eta = w.eta
    assert w.K == [[comp[0][0], comp[0][1] - eta], [comp[1][0] - eta, comp[1][1]]]


def test_hyp_status_cases():
    # a few conic atoms: flat, so the rank conditions hold
    s = forward_moments([(F(2), F(2), F(1)), (F(1, 2), F(-1), F(3))], 3)
    w = type2.build_workspace2(s)
    assert type2.hyp_status(w.d, f_of(w.d, w.a_min)) == "Hyp1"
    # seven conic atoms: the true conic block gives rank 2k + 1
    s = random_instance(CURVE, 3, 0, 7, 3, height=6).moments
    w = type2.build_workspace2(s)
    assert type2.hyp_status(w.d, f_of(w.d, hankel_block([s[(i, 0)] for i in range(7)]))) == "Hyp2"
    # an indefinite block has no status
    w = type2.build_workspace2(delta(1, 0))
    assert type2.hyp_status(w.d, f_of(w.d, [[F(-1) if i == j == 0 else F(0) for j in range(4)] for i in range(4)])) is None


def test_candidate_pairs_formula_cases():
    w = type2.build_workspace2(delta(0, 0))
    # u_max = 0: origin and (t_max, 0)
    assert type2.candidate_pairs2(w) == [(0, 0), (1, 0)]
    s = example("type2_example")[0]
    cands = type2.candidate_pairs2(type2.build_workspace2(s))
    assert len(cands) == 3
    (t1, u1), (t2, u2), _p = cands
    assert t1 * u1 == t2 * u2 == F(-51255911, 6577059124404) ** 2


def test_p_max_bounds_the_product_on_r2():
    s = example("type2_example")[0]
    w = type2.build_workspace2(s)
    tm, um, k12 = w.t_max, w.u_max, w.k12
    pt, pu = type2.candidate_pairs2(w)[-1]
    assert (tm - pt) * (um - pu) == k12 * k12
    bound = (QuadExt.sqrt(tm * um) - abs(k12)) ** 2
    assert pt * pu == bound
    rng = random.Random(3)
    for _ in range(200):
        sh = F(rng.randint(1, 10 ** 6), 10 ** 7)
        t = tm - sh
        u = um - k12 * k12 / sh - F(rng.randint(0, 10), 10 ** 3)
        if t >= 0 and u >= 0:
            assert type2.in_r2(w, t, u)
            assert t * u <= bound


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_region_laws(seed, sample_seed):
    w = type2.build_workspace2(instance(seed).moments)
    assert region_laws_hold(w, random.Random(sample_seed))


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_random_measures_round_trip(seed):
    gt = instance(seed)
    s = gt.moments
    r = type2.solve_type2(s)
    rm = rank(moment_matrix(s).m)
    assert r.exists
    assert rm <= r.minimal_atoms <= min(rm + 2, len(gt.atoms))
    assert len(r.measure) == r.minimal_atoms
    assert r.measure.residual(s) <= TOL


def test_squeezed_data_reaches_the_one_extra_atom_case():
    found = 0
    for seed in (11, 17, 24, 50):
        for mono in ((6, 0), (0, 6)):
            s = squeeze_corner(instance(seed).moments, mono)
            r = type2.solve_type2(s, construct=False)
            if not r.exists:
                continue
            w = type2.build_workspace2(s)
            if type2.minimal_case(w) == "+1":
                found += 1
                r = type2.solve_type2(s)
                assert r.minimal_atoms == rank(moment_matrix(s).m) + 1
                assert len(r.measure) == r.minimal_atoms
                assert r.measure.residual(s) <= TOL
    assert found >= 3


def test_general_coefficient_pulls_the_measure_back():
    a = F(2)
    atoms = [(F(1), F(-1, 3), F(1)), (F(-3), F(-3, 5), F(2)), (F(2), F(0), F(1, 2))]
    s = forward_moments(atoms, 3)
    r = type2.solve_type2(s, a)
    assert r.exists and r.minimal_atoms == 3
    assert r.measure.residual(s) <= TOL
    with mpmath.workprec(256):
        for x, y, _w in r.measure.atoms:
            assert abs(y * (x + y + 2 * x * y)) < TOL

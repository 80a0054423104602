"""Moment problem on the cubic y(x + y - xy) = 0.

The general curve y(x + y + a xy) = 0 is first scaled to a = -1.  The conic
x-moments are forced except for the corners beta^(c)_{0,0} and
beta^(c)_{2k,0}; shifting A_hat_min by (t, u) in those corners gives the
one-parameter family G(t, u).  F(G) must be a moment matrix on the conic and
H(G) a Hankel matrix on the line.  Both conditions cut out explicit regions
R1 and R2 of the (t, u) plane and only a finite set of points of R1 n R2
has to be tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from . import hamburger
from .decompose import (Decomposition, SolveReport, build_decomposition,
                        combine, embed_line, f_of, f_restrict, h_of, residual_ok)
from .hyperbola import _pull_back, solve_x_plus_y_minus_xy
from .momentseq import BivSeq, CurveType, affine_apply, check_relations, moment_matrix
from .ratlinalg import QuadExt, _dot, ldl_psd, matvec, pinv, rank, to_mpf

CURVE = CurveType.hyp2(-1)


def normalize_type2(s: BivSeq, a) -> BivSeq:
    """Moments after (x, y) -> (-a x, -a y), which takes y(x+y+axy) to a multiple of y(x+y-xy)."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    return affine_apply(s, 0, -a, 0, 0, 0, -a)


@dataclass
class Type2Workspace:
    d: Decomposition
    eta: Fraction
    a_min: list
    a_hat_min: list
    h_hat: list
    h22: list
    h12: list
    h23: list
    K: list
    t_max: Fraction
    u_max: Fraction
    k12: Fraction
    f22: list
    B_const: Fraction

    @property
    def k(self):
        return self.d.k


def b_set(k):
    return [(0, j) for j in range(k, 0, -1)] + [(i, 0) for i in range(k + 1)]


def build_workspace2(s: BivSeq, check: bool = True) -> Type2Workspace:
    d = build_decomposition(s, CURVE, check=check)
    k = s.k
    a_min, a_hat = d.a_min, d.a_hat_min
    eta = a_min[1][k - 1] - a_min[0][k]
    hh = h_of(d, a_hat)
    mid = list(range(1, k))
    h22 = [[hh[i][j] for j in mid] for i in mid]
    h12 = [hh[i][0] for i in mid]
    h23 = [hh[i][k] for i in mid]
    hp = pinv(h22)
    t_max = hh[0][0] - _dot(h12, matvec(hp, h12))
    u_max = hh[k][k] - _dot(h23, matvec(hp, h23))
    k12 = hh[0][k] - _dot(h12, matvec(hp, h23))
    t4 = [(0, j) for j in range(k, 0, -1)] + [(i, 0) for i in range(1, k)]
    f22 = f_restrict(d, f_of(d, a_min), t4)
    return Type2Workspace(d, eta, a_min, a_hat, hh, h22, h12, h23,
                          [[t_max, k12], [k12, u_max]], t_max, u_max, k12, f22,
                          k12 * k12 - t_max * u_max - eta * eta)


def g_of(w: Type2Workspace, t, u) -> list:
    k = w.k
    g = [list(row) for row in w.a_hat_min]
    g[0][0] = g[0][0] + t
    g[k][k] = g[k][k] + u
    return g


def gamma1(w: Type2Workspace, t, u) -> list:
    """Line moments: antidiagonals of H(G(t, u))."""
    h = h_of(w.d, g_of(w, t, u))
    k = w.k
    return [h[max(0, i - k)][i - max(0, i - k)] for i in range(2 * k + 1)]


def conic_x_moments(w: Type2Workspace, t, u) -> list:
    g = g_of(w, t, u)
    k = w.k
    return [g[max(0, i - k)][i - max(0, i - k)] for i in range(2 * k + 1)]


def hyp_status(d: Decomposition, f: list) -> Optional[str]:
    """'Hyp1', 'Hyp2' or None for a psd F(A) in the reordered basis."""
    rep = ldl_psd(f)
    if not rep.psd:
        return None
    k = d.k
    b = b_set(k)
    r1 = rank(f_restrict(d, f, [m for m in b if m != (k, 0)]))
    r2 = rank(f_restrict(d, f, [m for m in b if m != (0, k)]))
    if rep.rank == r1 == r2:
        return "Hyp1"
    if rep.rank == 2 * k + 1:
        return "Hyp2"
    return None


def _sqrt(x):
    return QuadExt.sqrt(x)


def candidate_pairs2(w: Type2Workspace) -> list:
    """The finite set of (t, u) that decides existence, in the order -, +, p_max."""
    t_max, u_max, k12, eta = w.t_max, w.u_max, w.k12, w.eta
    if t_max < 0 or u_max < 0:
        return []
    if u_max == 0:
        return [(Fraction(0), Fraction(0)), (t_max, Fraction(0))]
    if k12 == 0:
        return [(Fraction(0), Fraction(0)), (eta * eta / u_max, u_max), (t_max, u_max)]
    if t_max == 0:
        # R2 forces t <= 0 and -t u_max > 0 while R1 forces t >= 0
        return []
    root_tu = _sqrt(t_max * u_max)
    ak = abs(k12)
    pmax = (t_max - ak * root_tu / u_max, u_max - ak * root_tu / t_max)
    if eta == 0:
        # t u = 0 on the boundary of R1, so the boundary meets R2 on the axes
        return [(Fraction(0), Fraction(0)),
                (Fraction(0), u_max - k12 * k12 / t_max),
                (t_max - k12 * k12 / u_max, Fraction(0)),
                pmax]
    b = w.B_const
    disc = b * b - 4 * t_max * u_max * eta * eta
    out = []
    if disc >= 0:
        root = _sqrt(disc)
        for sgn in (-1, 1):
            u = (-b + sgn * root) / (2 * t_max)
            if u != 0:
                out.append((eta * eta / u, u))
    out.append(pmax)
    return out


def in_r1(w: Type2Workspace, t, u) -> bool:
    return t >= 0 and u >= 0 and t * u >= w.eta * w.eta


def in_r2(w: Type2Workspace, t, u) -> bool:
    return t <= w.t_max and u <= w.u_max and (w.t_max - t) * (w.u_max - u) >= w.k12 * w.k12


def check_pair(w: Type2Workspace, t, u) -> tuple:
    """(gamma1 result, hyp status of F(G(t, u)))."""
    g1 = hamburger.solve_hamburger(gamma1(w, t, u))
    if not g1.representable:
        return g1, None
    return g1, hyp_status(w.d, f_of(w.d, g_of(w, t, u)))


def _precheck(s: BivSeq) -> Optional[str]:
    if not ldl_psd(moment_matrix(s).m).psd:
        return "M(k) is not positive semidefinite"
    rel = check_relations(s, CURVE)
    if not rel.ok:
        return f"relation beta_(i+1,j+1) = beta_(i+1,j) + beta_(i,j+1) fails at {rel.violations[0][0]}"
    return None


def decide_type2(s: BivSeq) -> SolveReport:
    bad = _precheck(s)
    if bad:
        return SolveReport(False, failure_certificate=bad)
    w = build_workspace2(s, check=False)
    details = {"eta": w.eta, "t_max": w.t_max, "u_max": w.u_max, "k12": w.k12}
    cands = candidate_pairs2(w)
    if not cands:
        return SolveReport(False, failure_certificate="R1 and R2 do not meet (t_max, u_max, k12 exclude every candidate)",
                           details=details)
    reasons = []
    for t, u in cands:
        g1, hyp = check_pair(w, t, u)
        if g1.representable and hyp:
            return SolveReport(True, witness=(t, u), branch=f"candidate passes with {hyp}", details=details)
        reasons.append(f"({t}, {u}): " + (g1.reason if not g1.representable else "F(G) fails (Hyp)"))
    return SolveReport(False, failure_certificate="no candidate pair works: " + "; ".join(reasons),
                       details=details)


def minimal_case(w: Type2Workspace) -> str:
    """'+0', '+1' or '+2' relative to Rank M~, following the rank case analysis."""
    k = w.k
    d = w.d
    f_min = f_of(d, w.a_min)
    hyp = hyp_status(d, f_min)
    rank_h = rank(h_of(d, w.a_min))
    rank_h22 = rank(w.h22)
    f22_pd = ldl_psd(w.f22).rank == len(w.f22)
    h22_pd = ldl_psd(w.h22).rank == len(w.h22) if w.h22 else True
    eta, k12 = w.eta, w.k12
    if eta != 0 and k12 != 0 and rank_h == k and hyp is None:
        return "+2"
    if f22_pd and not h22_pd and rank_h == rank_h22 + 1 and w.t_max * w.u_max > eta * eta > 0:
        return "+1"
    if f22_pd and h22_pd:
        if eta == 0 and k12 != 0 and rank_h == k + 1 and hyp != "Hyp1":
            return "+1"
        if eta != 0 and k12 != 0 and hyp == "Hyp1" and rank_h == k:
            return "+1"
        if eta != 0 and k12 != 0 and hyp != "Hyp1":
            return "+1"
    return "+0"


def minimal_atoms_type2(s: BivSeq) -> int:
    if not decide_type2(s).exists:
        raise ValueError("sequence has no representing measure on y(x + y - xy) = 0")
    w = build_workspace2(s, check=False)
    return rank(w.d.mtilde) + int(minimal_case(w)[1])


def _rational_near(x, den=10 ** 6) -> Fraction:
    v = to_mpf(x, 128)
    return Fraction(int(mpmath.nint(v * den)), den)


def construction_points(w: Type2Workspace) -> list:
    """Candidate pairs plus extra points of R1 n R2 whose ranks can be smaller."""
    pts = list(candidate_pairs2(w))
    t_max, u_max, k12 = w.t_max, w.u_max, w.k12
    if t_max >= 0 and u_max >= 0:
        pts.append((t_max, u_max))
        if k12 == 0:
            pts.extend([(t_max / 2, u_max), (t_max, u_max / 2)])
        elif t_max > 0 and u_max > 0:
            # rational points on the boundary of R2 near the p_max point
            for scale in (1, Fraction(9, 10), Fraction(11, 10)):
                s0 = _rational_near(abs(k12) * QuadExt.sqrt(t_max / u_max) * scale) if (t_max / u_max) else Fraction(0)
                if s0 > 0:
                    pts.append((t_max - s0, u_max - k12 * k12 / s0))
    return pts


def construct_measure_type2(s: BivSeq, precision_bits: int = 256, tol="1e-25"):
    rep = decide_type2(s)
    if not rep.exists:
        raise ValueError("sequence has no representing measure on y(x + y - xy) = 0")
    w = build_workspace2(s, check=False)
    return _construct(s, w, precision_bits, tol)[0]


def _construct(s, w, precision_bits, tol):
    best = None
    last_err = None
    seen = set()
    for t, u in construction_points(w):
        if (t, u) in seen:
            continue
        seen.add((t, u))
        g1, hyp = check_pair(w, t, u)
        if not (g1.representable and hyp):
            continue
        try:
            line = embed_line(hamburger.extract_line_measure(gamma1(w, t, u), precision_bits=precision_bits))
            cs = s.replace({(i, 0): v for i, v in enumerate(conic_x_moments(w, t, u))})
            conic = solve_x_plus_y_minus_xy(cs, extract=True, precision_bits=precision_bits).measure
        except hamburger.ExtractionError as e:
            last_err = e
            continue
        meas = combine(line, conic)
        ok, res = residual_ok(meas, s, tol)
        if ok and (best is None or len(meas) < len(best[0])):
            best = (meas, (t, u))
    if best is None:
        raise hamburger.ExtractionError(f"no candidate produced a measure: {last_err}")
    return best


def solve_type2(s: BivSeq, a=-1, construct: bool = True, precision_bits: int = 256, tol="1e-25") -> SolveReport:
    """Decide, count and (optionally) build a measure; a is the coefficient of xy."""
    a = Fraction(a)
    t = s if a == -1 else normalize_type2(s, a)
    rep = decide_type2(t)
    if rep.exists:
        w = build_workspace2(t, check=False)
        rep.minimal_atoms = rank(w.d.mtilde) + int(minimal_case(w)[1])
        if construct:
            meas, wit = _construct(t, w, precision_bits, tol)
            if a != -1:
                meas = _pull_back(meas, lambda x, y: x / (-a), lambda x, y: y / (-a))
            rep.measure = meas
            rep.details["construction_point"] = wit
    return rep

"""Moment problem on the cubic y(1 - xy) = 0: the line y = 0 plus the hyperbola xy = 1.

The line and the hyperbola do not meet, so a measure is a line part plus a
conic part with no shared atoms.  Conic x-moments beta^(c)_{i,0} equal
beta_{i+1,1} for i <= 2k-2; only the last two, t = beta^(c)_{2k-1,0} and
u = beta^(c)_{2k,0}, are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import hamburger
from .decompose import (PreconditionError, SolveReport, combine, embed_line,
                        residual_ok)
from .hyperbola import extract_xy1
from .momentseq import BivSeq, CurveType, check_relations, moment_matrix
from .ratlinalg import (PartialSymMat, _dot, ldl_psd, matvec, pinv, psd_completion, rank)

CURVE = CurveType.hyp1()


def t_order(k):
    """(Y^k..Y, YX..YX^(k-1), 1..X^k)."""
    return ([(0, j) for j in range(k, 0, -1)] + [(i, 1) for i in range(1, k)]
            + [(i, 0) for i in range(k + 1)])


@dataclass
class Type1Workspace:
    k: int
    mhat_t: list
    n: list
    r: list
    m12: list
    n12: list
    f1: list
    f2: list
    w1: list
    w2: list
    t_prime: Fraction
    u_prime: Fraction
    u_dprime: Fraction

    def gamma1(self, s: BivSeq, t, u) -> list:
        return gamma1(s, t, u)

    def gamma2(self, s: BivSeq, t, u) -> list:
        return gamma2(s, t, u)


def gamma1(s: BivSeq, t, u) -> list:
    """Line moments: beta_{i,0} - beta_{i+1,1}, then beta_{2k-1,0} - t, beta_{2k,0} - u."""
    n = s.degree
    return [s[(i, 0)] - s[(i + 1, 1)] for i in range(n - 1)] + [s[(n - 1, 0)] - t, s[(n, 0)] - u]


def gamma2(s: BivSeq, t, u) -> list:
    """Conic moments of x^(i-2k): beta_{0,2k}, ..., beta_{0,1}, beta_{1,1}, ..., beta_{2k-1,1}, t, u."""
    n = s.degree
    return ([s[(0, n - i)] for i in range(n)] + [s[(i, 1)] for i in range(1, n)] + [t, u])


def conic_sequence(s: BivSeq, t, u) -> BivSeq:
    """The sequence whose moment matrix is F(G(t, u)): beta^(c)_{i,0} replaced."""
    n = s.degree
    upd = {(i, 0): s[(i + 1, 1)] for i in range(n - 1)}
    upd[(n - 1, 0)] = t
    upd[(n, 0)] = u
    return s.replace(upd)


def build_workspace1(s: BivSeq, check: bool = True) -> Type1Workspace:
    k = s.k
    mm = moment_matrix(s)
    if check:
        rel = check_relations(s, CURVE)
        if not rel.ok:
            raise PreconditionError(f"relations beta_(i+1,j+2) = beta_(i,j+1) fail at {rel.violations[0][0]}")
        if not ldl_psd(mm.m).psd:
            raise PreconditionError("M(k) is not positive semidefinite")
    order = t_order(k)
    mhat = mm.restrict(order)
    r = [row[:-1] for row in mhat[:-1]]
    m12 = [row[-1] for row in mhat[:-1]]
    a = [s[(i, 1)] for i in range(k)]
    b = [s[(i, 1)] for i in range(k, 2 * k - 1)]
    c = [s[(i, 1)] for i in range(k, 2 * k)]
    n12 = a + b + c
    corner = s[(2 * k - 1, 1)]
    n = [list(row) + [n12[i]] for i, row in enumerate(r)] + [n12 + [corner]]
    rp = pinv(r)
    t_prime = _dot(n12, matvec(rp, m12))
    g1 = gamma1(s, t_prime, 0)
    f1 = [[g1[i + j] for j in range(k)] for i in range(k)]
    w1 = [g1[k + i] for i in range(k)]
    u_prime = s[(2 * k, 0)] - _dot(w1, matvec(pinv(f1), w1))
    g2 = gamma2(s, t_prime, 0)
    f2 = [[g2[i + j] for j in range(2 * k)] for i in range(2 * k)]
    w2 = [g2[2 * k + i] for i in range(2 * k)]
    u_dprime = _dot(w2, matvec(pinv(f2), w2))
    return Type1Workspace(k, mhat, n, r, m12, n12, f1, f2, w1, w2, t_prime, u_prime, u_dprime)


def _pair_ok(s, t, u):
    g1 = hamburger.solve_hamburger(gamma1(s, t, u))
    g2 = hamburger.solve_strong(gamma2(s, t, u))
    return g1, g2


def decide_type1(s: BivSeq) -> SolveReport:
    mm = moment_matrix(s)
    if not ldl_psd(mm.m).psd:
        return SolveReport(False, failure_certificate="M(k) is not positive semidefinite")
    rel = check_relations(s, CURVE)
    if not rel.ok:
        return SolveReport(False, failure_certificate=f"relation fails at {rel.violations[0][0]}")
    w = build_workspace1(s, check=False)
    n_rep = ldl_psd(w.n)
    if not n_rep.psd:
        return SolveReport(False, failure_certificate="N(k) is not positive semidefinite")
    details = {"t_prime": w.t_prime, "u_prime": w.u_prime, "u_dprime": w.u_dprime}
    size = 3 * k_of(s)
    if ldl_psd(w.mhat_t).rank == size and n_rep.rank == size:
        return SolveReport(True, witness=None, branch="M_T and N positive definite", details=details)
    reasons = []
    for name, u in (("u'", w.u_prime), ("u''", w.u_dprime)):
        g1, g2 = _pair_ok(s, w.t_prime, u)
        if g1.representable and g2.representable:
            return SolveReport(True, witness=(w.t_prime, u), branch=f"gamma pair at (t', {name})",
                               details=details)
        reasons.append(f"at (t', {name}): gamma1 {'ok' if g1.representable else 'fails: ' + g1.reason}; "
                       f"gamma2 {'ok' if g2.representable else 'not strongly representable: ' + g2.reason}")
    return SolveReport(False, failure_certificate="; ".join(reasons), details=details)


def k_of(s: BivSeq) -> int:
    return s.k


def minimal_atoms_type1(s: BivSeq) -> int:
    rep = decide_type1(s)
    if not rep.exists:
        raise ValueError("sequence has no representing measure on y(1 - xy) = 0")
    w = build_workspace1(s, check=False)
    rm = rank(moment_matrix(s).m)
    return rm if rank(w.n) <= rm else rm + 1


def _witness_candidates(s: BivSeq, w: Type1Workspace, rep: SolveReport) -> list:
    """Points (t, u) to try when building a measure, best first."""
    out = []
    if rep.witness is not None:
        out.append(rep.witness)
    # positive definite branch: endpoints of the completion interval for the
    # missing <X^k, YX^k> entry, with u making gamma2 flat
    base = [list(row) + [w.m12[i], w.n12[i]] for i, row in enumerate(w.r)]
    last = len(w.r)
    base.append(w.m12 + [s[(2 * w.k, 0)], None])
    base.append(w.n12 + [None, s[(2 * w.k - 1, 1)]])
    comp = psd_completion(PartialSymMat(base, (last, last + 1)))
    for t in (comp.x_minus, comp.x_plus):
        g2 = gamma2(s, t, 0)
        k2 = 2 * w.k
        f2 = [[g2[i + j] for j in range(k2)] for i in range(k2)]
        w2 = [g2[k2 + i] for i in range(k2)]
        out.append((t, _dot(w2, matvec(pinv(f2), w2))))
    for u in (w.u_prime, w.u_dprime):
        out.append((w.t_prime, u))
    return out


def construct_measure_type1(s: BivSeq, precision_bits: int = 256, tol="1e-25"):
    rep = decide_type1(s)
    if not rep.exists:
        raise ValueError("sequence has no representing measure on y(1 - xy) = 0")
    w = build_workspace1(s, check=False)
    last_err = None
    best = None
    for t, u in _witness_candidates(s, w, rep):
        g1, g2 = _pair_ok(s, t, u)
        if not (g1.representable and g2.representable):
            continue
        try:
            line = embed_line(hamburger.extract_line_measure(gamma1(s, t, u), precision_bits=precision_bits))
            conic = extract_xy1(conic_sequence(s, t, u), precision_bits)
        except hamburger.ExtractionError as e:
            last_err = e
            continue
        meas = combine(line, conic)
        ok, res = residual_ok(meas, s, tol)
        if ok and (best is None or len(meas) < len(best[0])):
            best = (meas, (t, u), res)
    if best is None:
        raise hamburger.ExtractionError(f"no candidate produced a measure: {last_err}")
    return best[0]


def solve_type1(s: BivSeq, construct: bool = True, precision_bits: int = 256, tol="1e-25") -> SolveReport:
    rep = decide_type1(s)
    if rep.exists:
        rep.minimal_atoms = minimal_atoms_type1(s)
        if construct:
            rep.measure = construct_measure_type1(s, precision_bits, tol)
    return rep

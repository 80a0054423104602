"""Moment problem on the cubic y(ay + x^2 - y^2) = 0, a != 0.

Here the conic passes through the origin, where it meets the line y = 0.  The
conic x-moments beta^(c)_{i,0} are forced for i >= 2; the first two are
shifted by (t, u) in G(t, u) = A_hat_min + t E00 + u (E01 + E10).  F(G) >= 0
cuts out the parabola region R1 = {u^2 <= eta t} and H(G) >= 0 the region
R2 = {(u - u0)^2 <= (t0 - t) c}, c = H2/H22.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from . import hamburger
from .decompose import (Decomposition, SolveReport, build_decomposition, combine, embed_line,
                        f_of, f_restrict, h_of, residual_ok)
from .hyperbola import solve_ay_x2_y2
from .momentseq import BivSeq, CurveType, check_relations, moment_matrix
from .ratlinalg import QuadExt, _dot, ldl_psd, matvec, pinv, rank, to_mpf


@dataclass
class Type3Workspace:
    d: Decomposition
    a: Fraction
    eta: Fraction
    a_min: list
    a_hat_min: list
    h_hat: list
    h1: list
    h2: list
    h22: list
    h12_1: list
    h12_2: list
    t0: Fraction
    u0: Fraction
    c_ratio: Fraction

    @property
    def k(self):
        return self.d.k

    def h_squared(self, t):
        """h(t)^2 = (t0 - t) c, kept exact."""
        return (self.t0 - t) * self.c_ratio


@dataclass
class BoundaryPoints:
    points: list
    degenerate_line: bool


def build_workspace3(s: BivSeq, a, check: bool = True) -> Type3Workspace:
    a = Fraction(a)
    d = build_decomposition(s, CurveType.hyp3(a), check=check)
    k = s.k
    a_min, a_hat = d.a_min, d.a_hat_min
    eta = a_min[0][2] - a_min[1][1]
    hh = h_of(d, a_hat)
    tail = list(range(2, k + 1))
    h22 = [[hh[i][j] for j in tail] for i in tail]
    h1_idx = [0] + tail
    h2_idx = [1] + tail
    h1 = [[hh[i][j] for j in h1_idx] for i in h1_idx]
    h2 = [[hh[i][j] for j in h2_idx] for i in h2_idx]
    v1 = [hh[i][0] for i in tail]
    v2 = [hh[i][1] for i in tail]
    hp = pinv(h22)
    t0 = hh[0][0] - _dot(v1, matvec(hp, v1))
    u0 = hh[0][1] - _dot(v1, matvec(hp, v2))
    c = hh[1][1] - _dot(v2, matvec(hp, v2))
    return Type3Workspace(d, a, eta, a_min, a_hat, hh, h1, h2, h22, v1, v2, t0, u0, c)


def g_of(w: Type3Workspace, t, u) -> list:
    g = [list(row) for row in w.a_hat_min]
    g[0][0] = g[0][0] + t
    g[0][1] = g[0][1] + u
    g[1][0] = g[1][0] + u
    return g


def _antidiag(m):
    n = len(m) - 1
    return [m[max(0, i - n)][i - max(0, i - n)] for i in range(2 * n + 1)]


def gamma(w: Type3Workspace, t, u) -> list:
    return _antidiag(h_of(w.d, g_of(w, t, u)))


def conic_x_moments(w: Type3Workspace, t, u) -> list:
    return _antidiag(g_of(w, t, u))


def b_set(k):
    return [(i, 0) for i in range(k + 1)] + [(i, 1) for i in range(k)]


def hyp_tilde_status(d: Decomposition, f: list) -> Optional[str]:
    rep = ldl_psd(f)
    if not rep.psd:
        return None
    k = d.k
    b = b_set(k)
    r1 = rank(f_restrict(d, f, [m for m in b if m != (k, 0)]))
    r2 = rank(f_restrict(d, f, [m for m in b if m != (k - 1, 1)]))
    if rep.rank == r1 == r2:
        return "Hyp1"
    if rep.rank == 2 * k + 1:
        return "Hyp2"
    return None


def boundary_intersection(w: Type3Workspace) -> BoundaryPoints:
    """Points with u^2 = eta t and (u - u0)^2 = (t0 - t) c, for eta > 0."""
    eta, u0, c, t0 = w.eta, w.u0, w.c_ratio, w.t0
    if eta <= 0:
        raise ValueError("boundary intersection needs eta > 0")
    if c < 0:
        return BoundaryPoints([], False)
    if c == 0:
        t = u0 * u0 / eta
        return BoundaryPoints([(t, u0)] if t <= t0 else [], True)
    lead = 1 + c / eta
    quarter_disc = u0 * u0 - lead * (u0 * u0 - c * t0)
    if quarter_disc < 0:
        return BoundaryPoints([], False)
    if quarter_disc == 0:
        u = u0 / lead
        return BoundaryPoints([(u * u / eta, u)], False)
    root = QuadExt.sqrt(quarter_disc)
    pts = []
    for sgn in (-1, 1):
        u = (u0 + sgn * root) / lead
        pts.append((u * u / eta, u))
    return BoundaryPoints(pts, False)


def in_r1(w: Type3Workspace, t, u) -> bool:
    return w.eta >= 0 and t >= 0 and u * u <= w.eta * t


def in_r2(w: Type3Workspace, t, u) -> bool:
    if not ldl_psd(w.h2).psd:
        return False
    return t <= w.t0 and (u - w.u0) ** 2 <= (w.t0 - t) * w.c_ratio


def check_pair(w: Type3Workspace, t, u) -> tuple:
    g = hamburger.solve_hamburger(gamma(w, t, u))
    if not g.representable:
        return g, None
    return g, hyp_tilde_status(w.d, f_of(w.d, g_of(w, t, u)))


def _precheck(s: BivSeq, a) -> Optional[str]:
    if not ldl_psd(moment_matrix(s).m).psd:
        return "M(k) is not positive semidefinite"
    rel = check_relations(s, CurveType.hyp3(a))
    if not rel.ok:
        return f"relation beta_(i,j+3) = a beta_(i,j+2) + beta_(i+2,j+1) fails at {rel.violations[0][0]}"
    return None


def decide_type3(s: BivSeq, a) -> SolveReport:
    a = Fraction(a)
    bad = _precheck(s, a)
    if bad:
        return SolveReport(False, failure_certificate=bad)
    w = build_workspace3(s, a, check=False)
    k = w.k
    details = {"eta": w.eta, "t0": w.t0, "u0": w.u0, "c_ratio": w.c_ratio}
    f_min = f_of(w.d, w.a_min)
    hyp_min = hyp_tilde_status(w.d, f_min)
    rank_f = rank(f_min)
    details["hyp_A_min"] = hyp_min
    if hyp_min != "Hyp1" and rank_f != 2 * k - 1:
        return SolveReport(False, failure_certificate=f"A_min fails (H~yp)_1 and Rank F(A_min) = {rank_f} != 2k-1",
                           details=details)
    if w.eta == 0:
        if hyp_min != "Hyp1":
            return SolveReport(False, failure_certificate="eta = 0 but A_min fails (H~yp)_1", details=details)
        g = hamburger.solve_hamburger(gamma(w, 0, 0))
        if g.representable:
            return SolveReport(True, witness=(Fraction(0), Fraction(0)), branch="eta = 0", details=details)
        return SolveReport(False, failure_certificate=f"eta = 0 and gamma(0,0) is not representable: {g.reason}",
                           details=details)
    if w.eta < 0:
        return SolveReport(False, failure_certificate="eta < 0, so R1 is empty", details=details)
    if not ldl_psd(w.h2).psd:
        return SolveReport(False, failure_certificate="H2 is not psd, so R2 is empty", details=details)
    bp = boundary_intersection(w)
    details["boundary_points"] = bp.points
    if len(bp.points) == 2:
        if ldl_psd(w.h2).rank == len(w.h2):
            return SolveReport(True, witness=_two_point_witness(w, bp.points),
                               branch="eta > 0, two boundary points, H2 pd", details=details)
        return SolveReport(False, failure_certificate="two boundary points but H2 is not positive definite",
                           details=details)
    if len(bp.points) == 1:
        tt, uu = bp.points[0]
        for t, u in ((tt, uu), (w.t0, uu)):
            g, hyp = check_pair(w, t, u)
            if g.representable and hyp:
                return SolveReport(True, witness=(t, u), branch="eta > 0, single boundary point", details=details)
        return SolveReport(False, failure_certificate="single boundary point and neither (t~,u~) nor (t0,u~) works",
                           details=details)
    return SolveReport(False, failure_certificate="R1 and R2 do not meet", details=details)


def _two_point_witness(w, points):
    """The boundary point that passes both checks, smaller u first."""
    for t, u in sorted(points, key=lambda p: to_mpf(p[1])):
        g, hyp = check_pair(w, t, u)
        if g.representable and hyp:
            return (t, u)
    return None


def minimal_case(w: Type3Workspace) -> str:
    k = w.k
    eta = w.eta
    if eta == 0:
        return "+0"
    d = w.d
    f_min = f_of(d, w.a_min)
    hyp_min = hyp_tilde_status(d, f_min)
    rank_f = rank(f_min)
    h_min = h_of(d, w.a_min)
    rank_h = rank(h_min)
    h2_pd = ldl_psd(w.h2).rank == len(w.h2)
    bp = boundary_intersection(w)
    npts = len(bp.points)
    if hyp_min != "Hyp1" and rank_f == 2 * k - 1 and npts == 2 and h2_pd and rank_h == k:
        return "+2"
    if npts == 2 and hyp_tilde_status(d, f_of(d, w.a_hat_min)) == "Hyp1" and ldl_psd(h_min).rank == k + 1:
        return "+0"
    if npts == 1:
        # Rank F(G) grows by one on the boundary of R1 and Rank H(G) by one on
        # the boundary of R2, except at the vertex (t0, u0) where H(G)/H22 has
        # rank at most one less.  So the cheapest points of R1 n R2 are the
        # boundary point and the vertex; take the best one that is usable.
        tt, uu = bp.points[0]
        best = None
        for t, u in ((tt, uu), (w.t0, w.u0), (w.t0, uu)):
            if not (in_r1(w, t, u) and in_r2(w, t, u)):
                continue
            g, hyp = check_pair(w, t, u)
            if g.representable and hyp:
                extra = rank(f_of(d, g_of(w, t, u))) + rank(h_of(d, g_of(w, t, u))) - rank(d.mtilde)
                best = extra if best is None else min(best, extra)
        if best is not None:
            return f"+{best}"
    return "+1"


def minimal_atoms_type3(s: BivSeq, a) -> int:
    if not decide_type3(s, a).exists:
        raise ValueError("sequence has no representing measure on y(ay + x^2 - y^2) = 0")
    w = build_workspace3(s, a, check=False)
    return rank(w.d.mtilde) + int(minimal_case(w)[1])


def construction_points(w: Type3Workspace, rep: SolveReport) -> list:
    pts = []
    if rep.witness is not None:
        pts.append(rep.witness)
    if w.eta > 0:
        bp = boundary_intersection(w)
        pts.extend(bp.points)
        if len(bp.points) == 1:
            pts.append((w.t0, bp.points[0][1]))
        c = w.c_ratio
        if c > 0:
            # rational points on the boundary of R2: u = u0 + s, t = t0 - s^2/c
            for s in _rational_offsets(w):
                t, u = w.t0 - s * s / c, w.u0 + s
                if in_r1(w, t, u):
                    pts.append((t, u))
        if len(bp.points) == 2:
            (ta, ua), (tb, ub) = bp.points
            pts.append(((ta + tb) / 2, (ua + ub) / 2))
    return pts


def _rational_offsets(w):
    """A few s near where the R2 boundary crosses the R1 boundary."""
    bp = boundary_intersection(w)
    out = []
    for t, u in bp.points:
        v = to_mpf(u - w.u0, 128)
        for f in (Fraction(1), Fraction(99, 100), Fraction(101, 100), Fraction(1, 2)):
            out.append(Fraction(int(mpmath.nint(v * 10 ** 8)), 10 ** 8) * f)
    return out


def _construct(s, w, rep, precision_bits, tol):
    best = None
    last_err = None
    seen = set()
    for t, u in construction_points(w, rep):
        if (t, u) in seen:
            continue
        seen.add((t, u))
        g, hyp = check_pair(w, t, u)
        if not (g.representable and hyp):
            continue
        try:
            line = embed_line(hamburger.extract_line_measure(gamma(w, t, u), precision_bits=precision_bits))
            cs = s.replace({(i, 0): v for i, v in enumerate(conic_x_moments(w, t, u))})
            conic = solve_ay_x2_y2(cs, w.a, extract=True, precision_bits=precision_bits).measure
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


def construct_measure_type3(s: BivSeq, a, precision_bits: int = 256, tol="1e-25"):
    rep = decide_type3(s, a)
    if not rep.exists:
        raise ValueError("sequence has no representing measure on y(ay + x^2 - y^2) = 0")
    return _construct(s, build_workspace3(s, a, check=False), rep, precision_bits, tol)[0]


def solve_type3(s: BivSeq, a, construct: bool = True, precision_bits: int = 256, tol="1e-25") -> SolveReport:
    rep = decide_type3(s, a)
    if rep.exists:
        w = build_workspace3(s, a, check=False)
        rep.minimal_atoms = rank(w.d.mtilde) + int(minimal_case(w)[1])
        if construct:
            meas, wit = _construct(s, w, rep, precision_bits, tol)
            rep.measure = meas
            rep.details["construction_point"] = wit
    return rep

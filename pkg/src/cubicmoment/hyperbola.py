"""Moment problems on the three hyperbolas xy = 1, x + y - xy = 0, ay + x^2 - y^2 = 0.

Only xy = 1 is solved directly.  The other two conics are moved onto xy = 1 by
an affine change of variables and measures are pulled back through the exact
inverse map.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from . import hamburger
from .momentseq import BivSeq, affine_apply, moment_matrix
from .ratlinalg import ldl_psd, rank, to_mpf


@dataclass
class PlaneMeasure:
    atoms: list  # (x, y, w) as mpf
    exact: list = field(default_factory=list)  # (x, y, w) exact or None
    precision_bits: int = 256

    def __len__(self):
        return len(self.atoms)

    def moments(self, k: int) -> dict:
        with mpmath.workprec(self.precision_bits + 64):
            out = {}
            for d in range(2 * k + 1):
                for i in range(d, -1, -1):
                    j = d - i
                    out[(i, j)] = mpmath.fsum(w * x ** i * y ** j for x, y, w in self.atoms)
            return out

    def residual(self, s: BivSeq) -> mpmath.mpf:
        """max |beta_rec - beta| / max(1, |beta|) over all moments of s."""
        rec = self.moments(s.k)
        with mpmath.workprec(self.precision_bits + 64):
            worst = mpmath.mpf(0)
            for ij, val in rec.items():
                b = to_mpf(s[ij])
                worst = max(worst, abs(val - b) / max(mpmath.mpf(1), abs(b)))
            return worst

    def union(self, other: "PlaneMeasure", merge_tol=None) -> "PlaneMeasure":
        """Combine two measures, merging atoms that coincide."""
        atoms = list(self.atoms)
        exact = list(self.exact) if self.exact else [None] * len(self.atoms)
        other_exact = other.exact if other.exact else [None] * len(other.atoms)
        tol = merge_tol if merge_tol is not None else mpmath.mpf(2) ** (-self.precision_bits // 2)
        for (x, y, w), ex in zip(other.atoms, other_exact):
            for n, (x0, y0, w0) in enumerate(atoms):
                if abs(x - x0) <= tol and abs(y - y0) <= tol:
                    atoms[n] = (x0, y0, w0 + w)
                    e0 = exact[n]
                    exact[n] = (e0[0], e0[1], e0[2] + ex[2]) if (e0 and ex and e0[:2] == ex[:2]) else None
                    break
            else:
                atoms.append((x, y, w))
                exact.append(ex)
        return PlaneMeasure(atoms, exact, min(self.precision_bits, other.precision_bits))


@dataclass
class ConicReport:
    representable: bool
    rank: int
    branch: str
    measure: Optional[PlaneMeasure] = None


def _b_set(k):
    return [(0, j) for j in range(k, 0, -1)] + [(i, 0) for i in range(k + 1)]


def xy1_relations_hold(s: BivSeq) -> bool:
    return all(s[(i + 1, j + 1)] == s[(i, j)]
               for d in range(2 * s.k - 1) for i in range(d + 1) for j in [d - i])


def vsequence(s: BivSeq) -> list:
    """(beta_{0,2k}, ..., beta_{0,1}, beta_{0,0}, beta_{1,0}, ..., beta_{2k,0})."""
    n = 2 * s.k
    return [s[(0, n - i)] for i in range(n)] + [s[(i, 0)] for i in range(n + 1)]


def solve_xy1(s: BivSeq) -> ConicReport:
    mm = moment_matrix(s)
    rep = ldl_psd(mm.m)
    if not rep.psd:
        return ConicReport(False, rank(mm.m), "M(k) is not psd")
    if not xy1_relations_hold(s):
        return ConicReport(False, rep.rank, "relations beta_{i+1,j+1} = beta_{i,j} fail")
    b = _b_set(s.k)
    mb = ldl_psd(mm.restrict(b))
    if mb.rank == len(b):
        return ConicReport(True, rep.rank, "B-block pd")
    r1 = rank(mm.restrict([m for m in b if m != (0, s.k)]))
    r2 = rank(mm.restrict([m for m in b if m != (s.k, 0)]))
    if rep.rank == r1 == r2:
        return ConicReport(True, rep.rank, "Rank M = Rank M_{B-Y^k} = Rank M_{B-X^k}")
    return ConicReport(False, rep.rank,
                       f"rank condition fails: Rank M = {rep.rank}, without Y^k {r1}, without X^k {r2}")


def solve_xy1_via_strong(s: BivSeq) -> bool:
    """Second route: M(k) psd, the relations, and strong representability of v."""
    if not ldl_psd(moment_matrix(s).m).psd or not xy1_relations_hold(s):
        return False
    return hamburger.solve_strong(vsequence(s)).representable


def extract_xy1(s: BivSeq, precision_bits: int = 256) -> PlaneMeasure:
    """Atoms (x, 1/x) from the strong Hamburger measure of the v-sequence.

    v_i is the moment of x^(i-2k), so the line measure nu found for v has
    weights w/x^(2k) where w are the weights on the hyperbola.
    """
    v = vsequence(s)
    n = 2 * s.k
    lm = hamburger.extract_line_measure(v, avoid_zero=True, precision_bits=precision_bits)
    atoms, exact = [], []
    with mpmath.workprec(precision_bits + 64):
        for (x, w), ex in zip(lm.atoms, lm.exact or [None] * len(lm.atoms)):
            atoms.append((x, 1 / x, w * x ** n))
            if ex is not None:
                q, wq = ex
                exact.append((q, 1 / q, wq * q ** n))
            else:
                exact.append(None)
    return PlaneMeasure(atoms, exact, precision_bits)


# ---------------------------------------------------------------- x + y - xy = 0

XPY_MAP = (-1, 1, 0, -1, 0, 1)  # (X, Y) = (x - 1, y - 1)


def xpy_relations_hold(s: BivSeq) -> bool:
    return all(s[(i + 1, j + 1)] == s[(i + 1, j)] + s[(i, j + 1)]
               for d in range(2 * s.k - 1) for i in range(d + 1) for j in [d - i])


def _pull_back(meas: PlaneMeasure, fx, fy) -> PlaneMeasure:
    atoms, exact = [], []
    with mpmath.workprec(meas.precision_bits + 64):
        for (x, y, w), ex in zip(meas.atoms, meas.exact or [None] * len(meas.atoms)):
            atoms.append((fx(x, y), fy(x, y), w))
            exact.append((fx(ex[0], ex[1]), fy(ex[0], ex[1]), ex[2]) if ex is not None else None)
    return PlaneMeasure(atoms, exact, meas.precision_bits)


def solve_x_plus_y_minus_xy(s: BivSeq, extract: bool = False, precision_bits: int = 256) -> ConicReport:
    t = affine_apply(s, *XPY_MAP)
    rep = solve_xy1(t)
    if rep.representable and extract:
        rep.measure = _pull_back(extract_xy1(t, precision_bits), lambda x, y: x + 1, lambda x, y: y + 1)
    return rep


# ---------------------------------------------------------------- a y + x^2 - y^2 = 0

def ayx_map(a) -> tuple:
    """(X, Y) = (2/a (x - y + a/2), 2/a (-x - y + a/2)), so XY = 1 - 4/a^2 (ay + x^2 - y^2)."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("a must be nonzero")
    return (Fraction(1), 2 / a, -2 / a, Fraction(1), -2 / a, -2 / a)


def ayx_relations_hold(s: BivSeq, a) -> bool:
    a = Fraction(a)
    return all(s[(i, j + 2)] == s[(i + 2, j)] + a * s[(i, j + 1)]
               for d in range(2 * s.k - 1) for i in range(d + 1) for j in [d - i])


def solve_ay_x2_y2(s: BivSeq, a, extract: bool = False, precision_bits: int = 256) -> ConicReport:
    a = Fraction(a)
    t = affine_apply(s, *ayx_map(a))
    rep = solve_xy1(t)
    if rep.representable and extract:
        rep.measure = _pull_back(extract_xy1(t, precision_bits),
                                 lambda x, y: a * (x - y) / 4,
                                 lambda x, y: a * (2 - x - y) / 4)
    return rep

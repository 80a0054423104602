"""Splitting a cubic moment sequence into a line part and a conic part.

For p = y * c the measure splits as mu = mu_line + mu_conic with mu_line on
y = 0 and mu_conic on c = 0.  Only the pure x-moments beta_{i,0} are shared
between the two parts, so the whole problem reduces to choosing the Hankel
matrix A of conic x-moments: F(A) is the conic moment matrix and
H(A) = A11 - A is the Hankel matrix of the line moments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from .hamburger import LineMeasure
from .hyperbola import PlaneMeasure
from .momentseq import BivSeq, CurveType, check_relations, monomials, moment_matrix
from .ratlinalg import ldl_psd, matmul, pinv, rank, sub, submatrix, transpose


class PreconditionError(ValueError):
    """Raised when a solver precondition fails; carries a certificate string."""


def x_columns(k):
    return [(i, 0) for i in range(k + 1)]


def t1_columns(curve: CurveType, k: int) -> list:
    """Columns which, together with 1, X, ..., X^k, span the column space."""
    if curve.tag in ("hyp1", "hyp2"):
        # for hyp2 this has the same span as the differenced columns
        # Y^j X^i - Y^(j-1) X^i used when deriving the blocks
        return [(0, j) for j in range(k, 0, -1)] + [(i, 1) for i in range(1, k)]
    return [(i, 1) for i in range(k)] + [(i, 2) for i in range(k - 1)]


@dataclass
class Decomposition:
    k: int
    curve: CurveType
    order: tuple          # X^(0,k), T1, remaining columns
    index: dict           # monomial -> position in order
    mtilde: list          # reordered moment matrix
    a11: list
    a12: list
    a22: list
    a_min: list
    a_hat_min: list
    correction: tuple     # ((row, col) replaced, (row, col) source), 0-indexed
    eta: Fraction
    determined: dict = field(default_factory=dict)  # i -> beta^(c)_{i,0}

    @property
    def size(self):
        return len(self.order)


def coefficient_case(curve: CurveType) -> str:
    c = curve.conic()
    for key in ("00", "10", "20"):
        if c.get((int(key[0]), int(key[1])), 0) != 0:
            return key
    raise ValueError("conic has none of a00, a10, a20")


def _correction(case: str, k: int) -> tuple:
    if case == "00":
        return ((k - 1, k - 1), (k - 2, k))
    if case == "10":
        return ((0, k), (1, k - 1))
    return ((1, 1), (0, 2))


def determined_conic_moments(s: BivSeq, curve: CurveType) -> dict:
    """beta^(c)_{i,0} forced by c(x, y) = 0 on the conic atoms.

    Every conic moment with j >= 1 equals beta_{i,j} because the line y = 0
    contributes nothing there.  Multiplying c by x^i (shifted so the nonzero
    pure-x coefficient lands on x^i) gives the remaining identities.
    """
    c = curve.conic()
    a01 = c.get((0, 1), 0)
    a02 = c.get((0, 2), 0)
    a11 = c.get((1, 1), 0)
    case = coefficient_case(curve)
    shift = int(case[0])
    lead = c[(shift, 0)]
    n = s.degree
    out = {}
    for i in range(shift, n - 1 + shift):
        m = i - shift
        out[i] = -(a01 * s[(m, 1)] + a02 * s[(m, 2)] + a11 * s[(m + 1, 1)]) / lead
    return out


def build_decomposition(s: BivSeq, curve: CurveType, check: bool = True) -> Decomposition:
    k = s.k
    if check:
        rel = check_relations(s, curve)
        if not rel.ok:
            raise PreconditionError(f"curve relations fail at {rel.violations[0][0]}")
    xs = x_columns(k)
    t1 = t1_columns(curve, k)
    rest = [m for m in monomials(k) if m not in xs and m not in t1]
    order = tuple(xs + t1 + rest)
    mm = moment_matrix(s)
    pos = [mm.index[m] for m in order]
    mt = submatrix(mm.m, pos, pos)
    if check:
        rep = ldl_psd(mt)
        if not rep.psd:
            raise PreconditionError("moment matrix is not positive semidefinite")
    n1, n2 = len(xs), len(t1)
    a11 = [row[:n1] for row in mt[:n1]]
    a12 = [row[n1:n1 + n2] for row in mt[:n1]]
    a22 = [row[n1:n1 + n2] for row in mt[n1:n1 + n2]]
    a_min = matmul(matmul(a12, pinv(a22)), transpose(a12))
    case = coefficient_case(curve)
    (r, cc), (sr, sc) = _correction(case, k)
    a_hat = [list(row) for row in a_min]
    a_hat[r][cc] = a_hat[cc][r] = a_min[sr][sc]
    # gap between the forced entry and the value A_min happens to carry
    eta = a_min[sr][sc] - a_min[r][cc]
    return Decomposition(k, curve, order, {m: n for n, m in enumerate(order)}, mt,
                         a11, a12, a22, a_min, a_hat, ((r, cc), (sr, sc)), eta,
                         determined_conic_moments(s, curve))


def f_of(d: Decomposition, a) -> list:
    """Reordered moment matrix with the X^(0,k) block replaced by a."""
    n1 = d.k + 1
    if len(a) != n1 or any(len(row) != n1 for row in a):
        raise ValueError(f"expected a {n1} x {n1} block")
    out = [list(row) for row in d.mtilde]
    for i in range(n1):
        for j in range(n1):
            out[i][j] = a[i][j]
    return out


def h_of(d: Decomposition, a) -> list:
    if len(a) != d.k + 1:
        raise ValueError(f"expected a {d.k + 1} x {d.k + 1} block")
    return sub(d.a11, a)


def f_restrict(d: Decomposition, f: list, cols) -> list:
    idx = [d.index[m] for m in cols]
    return submatrix(f, idx, idx)


def hankel_block(vals) -> list:
    """(k+1) x (k+1) Hankel matrix of a length 2k+1 list."""
    n = len(vals) // 2 + 1
    return [[vals[i + j] for j in range(n)] for i in range(n)]


def antidiagonals(a) -> list:
    """Read the Hankel values off a (Hankel) matrix."""
    n = len(a)
    return [a[max(0, i - n + 1)][i - max(0, i - n + 1)] for i in range(2 * n - 1)]


def conic_sequence(s: BivSeq, conic_x) -> BivSeq:
    """beta with beta_{i,0} replaced by the conic x-moments."""
    return s.replace({(i, 0): v for i, v in enumerate(conic_x)})


def line_sequence(s: BivSeq, conic_x) -> list:
    return [s[(i, 0)] - v for i, v in enumerate(conic_x)]


def rank_split_holds(d: Decomposition) -> bool:
    """Rank M~ = Rank F(A_min) + Rank H(A_min)."""
    return rank(d.mtilde) == rank(f_of(d, d.a_min)) + rank(h_of(d, d.a_min))


# ---------------------------------------------------------------- reports

@dataclass
class SolveReport:
    exists: bool
    witness: Optional[tuple] = None
    minimal_atoms: Optional[int] = None
    measure: Optional[PlaneMeasure] = None
    failure_certificate: Optional[str] = None
    branch: Optional[str] = None
    details: dict = field(default_factory=dict)


def embed_line(lm: LineMeasure) -> PlaneMeasure:
    atoms = [(x, mpmath.mpf(0), w) for x, w in lm.atoms]
    exact = [(e[0], Fraction(0), e[1]) if e is not None else None
             for e in (lm.exact or [None] * len(lm.atoms))]
    return PlaneMeasure(atoms, exact, lm.precision_bits)


def combine(line: PlaneMeasure, conic: PlaneMeasure) -> PlaneMeasure:
    """Union of the two parts; atoms at a common point (the origin) are merged."""
    return line.union(conic)


def residual_ok(meas: PlaneMeasure, s: BivSeq, tol) -> tuple:
    r = meas.residual(s)
    return r <= mpmath.mpf(tol), r

"""Bivariate truncated moment sequences and their moment matrices.

Monomials X^i Y^j are stored as index pairs (i, j).  The moment matrix uses the
degree-lexicographic order 1, X, Y, X^2, XY, Y^2, ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .ratlinalg import Mat, QuadExt, nullspace, rank, submatrix

Monomial = tuple[int, int]
Poly = dict  # {(i, j): coefficient}

CURVE_TAGS = ("hyp1", "hyp2", "hyp3")


def monomials(k: int) -> list[Monomial]:
    """Degree-lex monomials of degree <= k: for each degree d, X^d, X^(d-1)Y, ..., Y^d."""
    return [(d - j, j) for d in range(k + 1) for j in range(d + 1)]


def index_pairs(deg: int) -> list[Monomial]:
    return [(i, d - i) for d in range(deg + 1) for i in range(d, -1, -1)]


@dataclass(frozen=True)
class BivSeq:
    """beta_{i,j} for i + j <= 2k."""
    k: int
    beta: Mapping[Monomial, object]

    def __post_init__(self):
        missing = [ij for ij in index_pairs(2 * self.k) if ij not in self.beta]
        if missing:
            raise ValueError(f"missing moments {missing[:5]}")

    def __getitem__(self, ij: Monomial):
        return self.beta[ij]

    @property
    def degree(self) -> int:
        return 2 * self.k

    @staticmethod
    def from_function(k: int, fn: Callable[[int, int], object]) -> "BivSeq":
        return BivSeq(k, {(i, j): fn(i, j) for (i, j) in index_pairs(2 * k)})

    def replace(self, updates: Mapping[Monomial, object]) -> "BivSeq":
        b = dict(self.beta)
        b.update(updates)
        return BivSeq(self.k, b)

    def values(self) -> list:
        return [self.beta[ij] for ij in index_pairs(2 * self.k)]


@dataclass(frozen=True)
class CurveType:
    """hyp1: y(1-xy);  hyp2: y(x+y+a*xy), canonical a = -1;  hyp3: y(ay+x^2-y^2)."""
    tag: str
    a: Fraction = field(default=Fraction(0))

    def __post_init__(self):
        if self.tag not in CURVE_TAGS:
            raise ValueError(f"unknown curve type {self.tag!r}")
        if self.tag in ("hyp2", "hyp3") and Fraction(self.a) == 0:
            raise ValueError(f"{self.tag} needs a nonzero coefficient a")
        object.__setattr__(self, "a", Fraction(self.a))

    @staticmethod
    def hyp1() -> "CurveType":
        return CurveType("hyp1")

    @staticmethod
    def hyp2(a=-1) -> "CurveType":
        return CurveType("hyp2", Fraction(a))

    @staticmethod
    def hyp3(a) -> "CurveType":
        return CurveType("hyp3", Fraction(a))

    def conic(self) -> Poly:
        """The conic factor c with p = y * c."""
        if self.tag == "hyp1":
            return {(0, 0): Fraction(1), (1, 1): Fraction(-1)}
        if self.tag == "hyp2":
            return {(1, 0): Fraction(1), (0, 1): Fraction(1), (1, 1): self.a}
        return {(0, 1): self.a, (2, 0): Fraction(1), (0, 2): Fraction(-1)}

    def cubic(self) -> Poly:
        return poly_mul({(0, 1): Fraction(1)}, self.conic())


@dataclass(frozen=True)
class MomentMatrix:
    m: Mat
    index: dict  # monomial -> row position
    basis: tuple

    def restrict(self, rows: Sequence[Monomial], cols: Sequence[Monomial] | None = None) -> Mat:
        cols = rows if cols is None else cols
        try:
            ri = [self.index[r] for r in rows]
            ci = [self.index[c] for c in cols]
        except KeyError as e:
            raise KeyError(f"monomial {e.args[0]} is not a column of M(k)") from None
        return submatrix(self.m, ri, ci)


def moment_matrix(s: BivSeq) -> MomentMatrix:
    basis = monomials(s.k)
    m = [[s[(a + c, b + d)] for (c, d) in basis] for (a, b) in basis]
    return MomentMatrix(m, {mono: n for n, mono in enumerate(basis)}, tuple(basis))


def restrict(mm: MomentMatrix, rows: Sequence[Monomial], cols: Sequence[Monomial] | None = None) -> Mat:
    return mm.restrict(rows, cols)


# ---------------------------------------------------------------- polynomials

def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (i, j), a in p.items():
        for (k, l), b in q.items():
            key = (i + k, j + l)
            out[key] = out.get(key, 0) + a * b
    return {m: c for m, c in out.items() if c != 0}


def poly_degree(p: Poly) -> int:
    return max((i + j for (i, j), c in p.items() if c != 0), default=0)


def riesz(s: BivSeq, p: Poly):
    """L_beta(p) = sum a_ij beta_ij."""
    if poly_degree(p) > s.degree:
        raise ValueError("polynomial degree exceeds the sequence degree")
    total = Fraction(0)
    for ij, c in p.items():
        if c != 0:
            total = total + c * s[ij]
    return total


def affine_apply(s: BivSeq, a, b, c, d, e, f) -> BivSeq:
    """beta~_{ij} = L(phi1^i phi2^j) with phi = (a + bx + cy, d + ex + fy)."""
    a, b, c, d, e, f = (Fraction(v) for v in (a, b, c, d, e, f))
    if b * f - c * e == 0:
        raise ValueError("affine map is singular (bf - ce = 0)")
    n = s.degree
    phi1 = {m: v for m, v in {(0, 0): a, (1, 0): b, (0, 1): c}.items() if v != 0}
    phi2 = {m: v for m, v in {(0, 0): d, (1, 0): e, (0, 1): f}.items() if v != 0}
    pow1 = [{(0, 0): Fraction(1)}]
    pow2 = [{(0, 0): Fraction(1)}]
    for _ in range(n):
        pow1.append(poly_mul(pow1[-1], phi1))
        pow2.append(poly_mul(pow2[-1], phi2))
    out = {}
    for (i, j) in index_pairs(n):
        out[(i, j)] = riesz(s, poly_mul(pow1[i], pow2[j]))
    return BivSeq(s.k, out)


def affine_inverse(a, b, c, d, e, f) -> tuple:
    """Coefficients of the inverse affine map in the same (a..f) convention."""
    a, b, c, d, e, f = (Fraction(v) for v in (a, b, c, d, e, f))
    det = b * f - c * e
    if det == 0:
        raise ValueError("affine map is singular")
    # x = (f (X - a) - c (Y - d)) / det,  y = (-e (X - a) + b (Y - d)) / det
    return ((-f * a + c * d) / det, f / det, -c / det,
            (e * a - b * d) / det, -e / det, b / det)


# ---------------------------------------------------------------- relations

@dataclass(frozen=True)
class RelationCheck:
    ok: bool
    violations: list


def check_relations(s: BivSeq, curve: CurveType) -> RelationCheck:
    """Moment identities L(x^i y^j p) = 0 for i + j <= 2k - 3 forced by the cubic p."""
    p = curve.cubic()
    bad = []
    for (i, j) in index_pairs(s.degree - 3):
        val = riesz(s, poly_mul({(i, j): Fraction(1)}, p))
        if val != 0:
            bad.append(((i, j), val))
    return RelationCheck(not bad, bad)


def column_relation(s: BivSeq, p: Poly) -> list:
    """p(X, Y) evaluated on the columns of M(k); zero iff p is a column relation."""
    if poly_degree(p) > s.k:
        raise ValueError("column relations need deg p <= k")
    mm = moment_matrix(s)
    out = [Fraction(0)] * len(mm.basis)
    for mono, c in p.items():
        col = mm.index[mono]
        for r in range(len(out)):
            out[r] = out[r] + c * mm.m[r][col]
    return out


def kernel_polys(mm: MomentMatrix, cols: Sequence[Monomial] | None = None) -> list[Poly]:
    """Column relations among the chosen columns (default: all), as polynomials."""
    cols = list(mm.basis) if cols is None else list(cols)
    sub_m = mm.restrict(cols, cols)
    out = []
    for v in nullspace(sub_m):
        out.append({cols[n]: c for n, c in enumerate(v) if c != 0})
    return out


def moment_rank(s: BivSeq) -> int:
    return rank(moment_matrix(s).m)


def sequence_from_values(k: int, values: Iterable) -> BivSeq:
    vals = list(values)
    pairs = index_pairs(2 * k)
    if len(vals) != len(pairs):
        raise ValueError("wrong number of moments")
    return BivSeq(k, dict(zip(pairs, vals)))


def is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, QuadExt))

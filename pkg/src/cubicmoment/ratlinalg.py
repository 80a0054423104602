"""Exact linear algebra over Q and over a single real quadratic field Q(sqrt d).

Matrices are plain lists of row lists.  Entries are ``Fraction`` (or ``int``)
or :class:`QuadExt`.  Nothing here touches floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import mpmath


class MixedRadicandError(ArithmeticError):
    """Raised when two elements of different quadratic fields meet."""


class NotPPSDError(ValueError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write n = s**2 * r, removing small square factors and perfect squares.

    r is not guaranteed square-free (that would need factoring), but r == 1
    exactly when n is a perfect square.
    """
    s = 1
    root = math.isqrt(n)
    if root * root == n:
        return root, 1
    p = 2
    while p < 2000 and p * p <= n:
        pp = p * p
        while n % pp == 0:
            n //= pp
            s *= p
        p += 1 if p == 2 else 2
    root = math.isqrt(n)
    if root * root == n:
        return s * root, 1
    return s, n


class QuadExt:
    """An element a + b*sqrt(d) with rational a, b and integer radicand d > 1.

    Arithmetic with ``Fraction``/``int`` is supported.  Results whose
    irrational part vanishes collapse back to ``Fraction``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def sqrt(q) -> Union[Fraction, "QuadExt"]:
        """Exact square root of a nonnegative rational."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("square root of a negative rational")
        if q == 0:
            return Fraction(0)
        # sqrt(p/r) = sqrt(p*r)/r
        s, rad = _squarefree_split(q.numerator * q.denominator)
        if rad == 1:
            return Fraction(s, q.denominator)
        return QuadExt(0, Fraction(s, q.denominator), rad)

    @staticmethod
    def make(a, b, d: int):
        if b == 0:
            return Fraction(a)
        return QuadExt(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d == self.d:
                return other.a, other.b
            ratio = Fraction(other.d, self.d)
            sn, rn = _squarefree_split(ratio.numerator * ratio.denominator)
            if rn != 1:
                raise MixedRadicandError(f"sqrt({self.d}) vs sqrt({other.d})")
            # sqrt(d2) = sqrt(d1) * sqrt(d2/d1) = sqrt(d1) * sn / den
            return other.a, other.b * Fraction(sn, ratio.denominator)
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QuadExt.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        x, y = c
        return QuadExt.make(self.a * x + self.b * y * self.d, self.a * y + self.b * x, self.d)

    __rmul__ = __mul__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def _inverse(self):
        n = self.a * self.a - self.b * self.b * self.d
        return QuadExt.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QuadExt):
            return self * other._inverse()
        if isinstance(other, (int, Fraction)):
            return QuadExt.make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out: Union[Fraction, QuadExt] = Fraction(1)
        base: Union[Fraction, QuadExt] = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 d (never equal, d is not a square)
        return sa if self.a * self.a > self.b * self.b * self.d else sb

    def __eq__(self, other):
        try:
            return sign(self - other) == 0
        except MixedRadicandError:
            return False
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.to_mpf(80))

    def to_mpf(self, prec: int = 256):
        with mpmath.workprec(prec + 20):
            v = to_mpf(self.a) + to_mpf(self.b) * mpmath.sqrt(self.d)
        return v

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        sign = "-" if self.b < 0 else "+"
        return f"{self.a} {sign} {abs(self.b)}*sqrt({self.d})"


Scalar = Union[int, Fraction, QuadExt]
Mat = list  # list of row lists


def sign(x) -> int:
    if isinstance(x, QuadExt):
        return x.sign()
    return (x > 0) - (x < 0)


def to_mpf(x, prec: int | None = None):
    """Convert an exact scalar to an mpmath number at the current precision."""
    if isinstance(x, QuadExt):
        return x.to_mpf(prec or mpmath.mp.prec)
    x = Fraction(x)
    if prec is None:
        return mpmath.mpf(x.numerator) / x.denominator
    with mpmath.workprec(prec):
        return mpmath.mpf(x.numerator) / x.denominator


def radicand_of(entries) -> int:
    """The common radicand of a collection of scalars (0 if all rational)."""
    d = 0
    for x in entries:
        if isinstance(x, QuadExt):
            if d == 0:
                d = x.d
            elif x.d != d:
                x + QuadExt(0, 1, d)  # raises if incompatible
    return d


# ---------------------------------------------------------------- basics

def zeros(n: int, m: int | None = None) -> Mat:
    m = n if m is None else m
    return [[Fraction(0)] * m for _ in range(n)]


def identity(n: int) -> Mat:
    out = zeros(n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def as_matrix(rows) -> Mat:
    return [[x if isinstance(x, QuadExt) else Fraction(x) for x in row] for row in rows]


def shape(m: Mat) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def transpose(m: Mat) -> Mat:
    return [list(col) for col in zip(*m)] if m else []


def matmul(a: Mat, b: Mat) -> Mat:
    if not a:
        return []
    bt = transpose(b)
    if not bt:
        return [[] for _ in a]
    out = []
    for row in a:
        out.append([_dot(row, col) for col in bt])
    return out


def _dot(u, v):
    s = Fraction(0)
    for x, y in zip(u, v):
        if x and y:
            s = s + x * y
    return s


def matvec(a: Mat, v) -> list:
    return [_dot(row, v) for row in a]


def add(a: Mat, b: Mat) -> Mat:
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def sub(a: Mat, b: Mat) -> Mat:
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def scale(a: Mat, c) -> Mat:
    return [[c * x for x in r] for r in a]


def submatrix(m: Mat, rows: Sequence[int], cols: Sequence[int]) -> Mat:
    return [[m[i][j] for j in cols] for i in rows]


def principal(m: Mat, idx: Sequence[int]) -> Mat:
    return submatrix(m, idx, idx)


def is_symmetric(m: Mat) -> bool:
    n = len(m)
    return all(m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n))


def is_zero_matrix(m: Mat) -> bool:
    return all(x == 0 for row in m for x in row)


# ---------------------------------------------------------------- elimination

def _all_rational(m: Mat) -> bool:
    return not any(isinstance(x, QuadExt) for row in m for x in row)


def _bareiss_rank(m: Mat) -> int:
    """Fraction-free rank: scale rows to integers, then Bareiss elimination."""
    rows = []
    for row in m:
        den = 1
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
        r = [int(Fraction(x) * den) for x in row]
        if any(r):
            rows.append(r)
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(rank + 1, len(rows)):
            r = rows[i]
            f = r[col]
            pc = p[col]
            rows[i] = [(pc * r[j] - f * p[j]) // prev if j > col else 0
                       for j in range(ncols)]
        prev = p[col]
        rank += 1
        if rank == len(rows):
            break
    return rank


def rref(m: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form over the field of the entries, with pivot columns."""
    a = [list(r) for r in m]
    nr, nc = shape(a)
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(m: Mat) -> int:
    if not m or not m[0]:
        return 0
    if _all_rational(m):
        return _bareiss_rank(m)
    return len(rref(m)[1])


def inverse(m: Mat) -> Mat:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def pinv(m: Mat) -> Mat:
    """Moore-Penrose pseudoinverse via a full-rank factorization m = F G."""
    nr, nc = shape(m)
    red, piv = rref(m)
    r = len(piv)
    if r == 0:
        return zeros(nc, nr)
    g = red[:r]
    f = [[row[j] for j in piv] for row in m]
    gt = transpose(g)
    ft = transpose(f)
    left = inverse(matmul(g, gt))
    right = inverse(matmul(ft, f))
    return matmul(matmul(gt, left), matmul(right, ft))


def nullspace(m: Mat) -> list[list]:
    """Basis of the right kernel, one vector per free column."""
    nr, nc = shape(m)
    red, piv = rref(m)
    free = [c for c in range(nc) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * nc
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def solve_consistent(a: Mat, b: Mat) -> Mat | None:
    """Some W with A W = B, or None when the system is inconsistent."""
    nr, nc = shape(a)
    nb = len(b[0]) if b else 0
    aug = [list(a[i]) + list(b[i]) for i in range(nr)]
    red, piv = rref(aug)
    if any(p >= nc for p in piv):
        return None
    w = zeros(nc, nb)
    for i, p in enumerate(piv):
        w[p] = list(red[i][nc:])
    return w


# ---------------------------------------------------------------- psd tests

@dataclass(frozen=True)
class PsdReport:
    psd: bool
    rank: int


def ldl_psd(m: Mat) -> PsdReport:
    """Symmetric-pivoted exact LDL^T.

    Pivots on a positive diagonal entry while one exists.  A negative diagonal
    entry, or a nonzero off-diagonal entry once all remaining diagonals are
    zero, proves the matrix is not psd.  The rank of a psd matrix is the number
    of pivots taken.
    """
    a = [list(r) for r in m]
    active = list(range(len(a)))
    pivots = 0
    while active:
        best = None
        for i in active:
            s = sign(a[i][i])
            if s < 0:
                return PsdReport(False, -1)
            if s > 0 and best is None:
                best = i
        if best is None:
            for i in active:
                for j in active:
                    if a[i][j] != 0:
                        return PsdReport(False, -1)
            break
        p = a[best][best]
        active.remove(best)
        col = [a[i][best] for i in range(len(a))]
        for i in active:
            ci = col[i]
            if ci == 0:
                continue
            f = ci / p
            row = a[i]
            for j in active:
                cj = col[j]
                if cj != 0:
                    row[j] = row[j] - f * cj
        pivots += 1
    return PsdReport(True, pivots)


def is_psd(m: Mat) -> bool:
    return ldl_psd(m).psd


def is_pd(m: Mat) -> bool:
    rep = ldl_psd(m)
    return rep.psd and rep.rank == len(m)


def psd_rank(m: Mat) -> int | None:
    """Rank when m is psd, otherwise None."""
    rep = ldl_psd(m)
    return rep.rank if rep.psd else None


# ---------------------------------------------------------------- Schur complements

def _blocks(m: Mat, head: int):
    n = len(m)
    top = list(range(head))
    bot = list(range(head, n))
    return (submatrix(m, top, top), submatrix(m, top, bot),
            submatrix(m, bot, top), submatrix(m, bot, bot))


def schur(m: Mat, head: int, of_lower: bool = False) -> Mat:
    """M/A = C - B^T A^+ B for the leading head x head block A.

    With ``of_lower`` the complement of the trailing block is returned instead:
    M/C = A - B C^+ B^T.
    """
    a, b, bt, c = _blocks(m, head)
    if of_lower:
        if not c:
            return a
        return sub(a, matmul(matmul(b, pinv(c)), bt))
    if not a:
        return c
    return sub(c, matmul(matmul(bt, pinv(a)), b))


@dataclass(frozen=True)
class BlockPsd:
    psd: bool
    colspace_ok: bool
    rank_m: int
    rank_a: int
    rank_schur: int


def colspace_contains(a: Mat, b: Mat) -> bool:
    """Whether every column of b lies in the column space of a."""
    if not b or not b[0]:
        return True
    return rank([ra + rb for ra, rb in zip(a, b)]) == rank(a)


def block_psd(m: Mat, head: int) -> BlockPsd:
    """Albert's criterion for M = [[A, B], [B^T, C]] with A of size head."""
    a, b, _bt, _c = _blocks(m, head)
    ra = ldl_psd(a) if a else PsdReport(True, 0)
    col_ok = colspace_contains(a, b) if a else all(x == 0 for row in b for x in row)
    s = schur(m, head)
    rs = ldl_psd(s) if s else PsdReport(True, 0)
    psd = ra.psd and col_ok and rs.psd
    rank_m = rank(m)
    rank_a = rank(a) if a else 0
    rank_s = rank(s) if s else 0
    if psd and rank_m != rank_a + rank_s:
        raise AssertionError("rank additivity failed on a psd matrix")
    return BlockPsd(psd, col_ok, rank_m, rank_a, rank_s)


def colspace_solve(a: Mat, b: Mat, c: Mat) -> Mat:
    """W = A^+ B, which solves both A W = B and B^T W = C when Rank M = Rank A."""
    w = matmul(pinv(a), b)
    if matmul(a, w) != b:
        raise ValueError("A W = B has no solution: columns of B leave col-space(A)")
    if matmul(transpose(b), w) != c:
        raise ValueError("B^T W != C: the rank hypothesis Rank M = Rank A fails")
    return w


# ---------------------------------------------------------------- completion

@dataclass(frozen=True)
class PartialSymMat:
    """A symmetric matrix with the pair (i, j), (j, i) unspecified (0-indexed, i < j)."""
    base: Mat
    missing: tuple[int, int]

    def fill(self, x) -> Mat:
        i, j = self.missing
        m = [list(r) for r in self.base]
        m[i][j] = x
        m[j][i] = x
        return m


@dataclass(frozen=True)
class Completion:
    x_minus: Scalar
    x_plus: Scalar
    rank_at_endpoint: int
    rank_interior: int


def _scalar_schur(m: Mat) -> Scalar:
    """Schur complement of the leading block in a matrix with one extra row/col."""
    s = schur(m, len(m) - 1)
    return s[0][0]


def psd_completion(p: PartialSymMat) -> Completion:
    """The interval of values x making the partial matrix psd."""
    i, j = p.missing
    n = len(p.base)
    rest = [r for r in range(n) if r not in (i, j)]
    a1 = principal(p.base, rest)
    a2 = principal(p.base, rest + [i])
    a3 = principal(p.base, rest + [j])
    r2 = psd_rank(a2)
    r3 = psd_rank(a3)
    if r2 is None or r3 is None:
        raise NotPPSDError("a fully specified principal submatrix is not psd")
    a = [p.base[r][i] for r in rest]
    b = [p.base[r][j] for r in rest]
    if rest:
        a1p = pinv(a1)
        centre = _dot(b, matvec(a1p, a))
    else:
        centre = Fraction(0)
    s2 = _scalar_schur(a2)
    s3 = _scalar_schur(a3)
    root = QuadExt.sqrt(s2 * s3)
    top = max(r2, r3)
    return Completion(centre - root, centre + root, top, top + 1)


def kernel_extends(full: Mat, subset: Sequence[int], v) -> bool:
    """Extension principle: a kernel vector of a principal restriction of a
    psd matrix, padded with zeros, lies in the kernel of the whole matrix."""
    sub_m = principal(full, subset)
    if any(x != 0 for x in matvec(sub_m, v)):
        return False
    vhat = [Fraction(0)] * len(full)
    for pos, val in zip(subset, v):
        vhat[pos] = val
    return all(x == 0 for x in matvec(full, vhat))

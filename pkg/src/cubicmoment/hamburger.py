"""Univariate truncated Hamburger problems on R and on R minus {0}.

A sequence gamma = (g_0, ..., g_{2m}) is represented by a plain list of exact
scalars.  Decisions are exact; atoms are produced in mpmath at a requested
binary precision after exact Sturm isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from .ratlinalg import (QuadExt, ldl_psd, rank, sign, solve_consistent, to_mpf,
                        pinv, matvec, _dot)


class ExtractionError(RuntimeError):
    pass


# ---------------------------------------------------------------- Hankel views

def hankel(g: Sequence) -> list:
    """A_gamma: the (m+1) x (m+1) Hankel matrix of a length 2m+1 sequence."""
    if len(g) % 2 != 1:
        raise ValueError("Hankel sequences must have odd length")
    m = len(g) // 2
    return [[g[i + j] for j in range(m + 1)] for i in range(m + 1)]


def corner(g: Sequence, size: int) -> list:
    """Leading principal block of the given size."""
    return [[g[i + j] for j in range(size)] for i in range(size)]


def tail(g: Sequence, size: int) -> list:
    """Trailing principal block of the given size."""
    m = len(g) // 2
    off = m + 1 - size
    return [[g[off + i + off + j] for j in range(size)] for i in range(size)]


@dataclass(frozen=True)
class HankelRanks:
    psd: bool
    rank: int
    corner_rank: int
    tail_rank: int


def hankel_ranks(g: Sequence) -> HankelRanks:
    m = len(g) // 2
    a = hankel(g)
    rep = ldl_psd(a)
    r = rep.rank if rep.psd else rank(a)
    return HankelRanks(rep.psd, r, rank(corner(g, m)) if m else 0, rank(tail(g, m)) if m else 0)


@dataclass(frozen=True)
class HamburgerResult:
    representable: bool
    rank: int
    reason: str


def solve_hamburger(g: Sequence) -> HamburgerResult:
    """R-representability: A psd and (A(m-1) pd or Rank A(m-1) = Rank A)."""
    m = len(g) // 2
    rep = ldl_psd(hankel(g))
    if not rep.psd:
        return HamburgerResult(False, rank(hankel(g)), "A_gamma is not psd")
    if m == 0:
        return HamburgerResult(True, rep.rank, "single moment")
    c = ldl_psd(corner(g, m))
    if c.rank == m:
        return HamburgerResult(True, rep.rank, "A_gamma(m-1) is pd")
    if c.rank == rep.rank:
        return HamburgerResult(True, rep.rank, "flat: Rank A_gamma(m-1) = Rank A_gamma")
    return HamburgerResult(False, rep.rank,
                           f"rank jump: Rank A_gamma(m-1) = {c.rank} < Rank A_gamma = {rep.rank}")


def solve_strong(g: Sequence) -> HamburgerResult:
    """(R minus {0})-representability: A psd and (A pd or rank A = corner rank = tail rank)."""
    m = len(g) // 2
    a = hankel(g)
    rep = ldl_psd(a)
    if not rep.psd:
        return HamburgerResult(False, rank(a), "A_gamma is not psd")
    if rep.rank == m + 1:
        return HamburgerResult(True, rep.rank, "A_gamma is pd")
    rc = ldl_psd(corner(g, m)).rank
    rt = ldl_psd(tail(g, m)).rank
    if rc == rep.rank == rt:
        return HamburgerResult(True, rep.rank, "Rank A = Rank A(m-1) = Rank A[m-1]")
    return HamburgerResult(False, rep.rank,
                           f"Rank A = {rep.rank}, corner rank {rc}, tail rank {rt}")


# ---------------------------------------------------------------- exact polynomials
# coefficient lists, lowest degree first

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_rem(a, b):
    a = _trim(a)
    b = _trim(b)
    lead = b[-1]
    while len(a) >= len(b) and a:
        f = a[-1] / lead
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = a[shift + i] - f * c
        a.pop()
        a = _trim(a)
    return a


def sturm_chain(p):
    p = _trim(p)
    dp = [i * c for i, c in enumerate(p)][1:]
    chain = [p, _trim(dp)]
    while chain[-1] and len(chain[-1]) > 1:
        r = _poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_changes(chain, x) -> int:
    signs = [sign(poly_eval(q, x)) for q in chain]
    signs = [s for s in signs if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _abs_bound(c) -> Fraction:
    """A rational upper bound for |c|."""
    if isinstance(c, QuadExt):
        return abs(c.a) + abs(c.b) * (math.isqrt(c.d) + 1)
    return abs(Fraction(c))


def isolate_real_roots(p) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals (lo, hi], each holding exactly one real root of p."""
    p = _trim(p)
    if len(p) <= 1:
        return []
    lead = p[-1]
    bound = 1 + max(_abs_bound(c / lead) for c in p[:-1])
    chain = sturm_chain(p)
    lo, hi = -bound - 1, bound + 1
    out = []
    stack = [(lo, hi, _sign_changes(chain, lo), _sign_changes(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        n = va - vb
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        step = (b - a) / 7
        while poly_eval(p, mid) == 0:
            mid += step
            step /= 3
        vm = _sign_changes(chain, mid)
        stack.append((a, mid, va, vm))
        stack.append((mid, b, vm, vb))
    out.sort()
    return out


def _refine(p, lo, hi, prec):
    """Approximate the unique root in (lo, hi] to about prec bits."""
    if poly_eval(p, hi) == 0:
        return to_mpf(hi, prec), hi
    with mpmath.workprec(prec + 64):
        coeffs = [to_mpf(c) for c in reversed(p)]
        f = lambda x: mpmath.polyval(coeffs, x)
        a, b = to_mpf(lo), to_mpf(hi)
        x = mpmath.findroot(f, (a, b), solver="anderson", tol=mpmath.mpf(2) ** (-(prec + 40)),
                            maxsteps=4000, verify=False)
        if not (a <= x <= b):
            x = _bisect(f, a, b, prec)
        # exact rational root detection
        q = _rational_guess(x)
        if q is not None and lo < q <= hi and poly_eval(p, q) == 0:
            return to_mpf(q, prec + 64), q
        return +x, None


def _bisect(f, a, b, prec):
    fa = f(a)
    for _ in range(prec + 80):
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a + b) / 2


def _rational_guess(x) -> Optional[Fraction]:
    try:
        scaled = int(mpmath.nint(x * mpmath.mpf(2) ** 200))
    except (ValueError, OverflowError):
        return None
    return Fraction(scaled, 2 ** 200).limit_denominator(10 ** 12)


# ---------------------------------------------------------------- extraction

@dataclass
class LineMeasure:
    atoms: list  # (x, w) as mpf
    exact: list = field(default_factory=list)  # (x, w) exact or None per atom
    precision_bits: int = 256

    def __len__(self):
        return len(self.atoms)

    def moments(self, n: int) -> list:
        with mpmath.workprec(self.precision_bits + 64):
            return [mpmath.fsum(w * x ** i for x, w in self.atoms) for i in range(n)]


def generating_polynomial(g: Sequence, r: int):
    """Monic x^r - sum c_i x^i from the Hankel system A(r-1) c = (g_r..g_{2r-1})."""
    a = corner(g, r)
    rhs = [[g[r + i]] for i in range(r)]
    sol = solve_consistent(a, rhs)
    if sol is None:
        raise ExtractionError("generating polynomial system is inconsistent")
    c = [row[0] for row in sol]
    return [-x for x in c] + [Fraction(1)]


def _flat_extract(g, r, prec, avoid_zero):
    p = generating_polynomial(g, r)
    if avoid_zero and p[0] == 0:
        raise ExtractionError("zero atom")
    boxes = isolate_real_roots(p)
    if len(boxes) != r:
        raise ExtractionError(f"expected {r} real roots, isolated {len(boxes)}")
    roots = [_refine(p, lo, hi, prec) for lo, hi in boxes]
    exact_roots = [q for _x, q in roots]
    if all(q is not None for q in exact_roots):
        v = [[q ** i for q in exact_roots] for i in range(r)]
        sol = solve_consistent(v, [[g[i]] for i in range(r)])
        weights = [row[0] for row in sol]
        if any(sign(w) <= 0 for w in weights):
            raise ExtractionError("nonpositive weight")
        atoms = [(to_mpf(q, prec + 64), to_mpf(w, prec + 64)) for q, w in zip(exact_roots, weights)]
        return LineMeasure(atoms, list(zip(exact_roots, weights)), prec)
    with mpmath.workprec(prec + 64):
        xs = [x for x, _q in roots]
        v = mpmath.matrix([[x ** i for x in xs] for i in range(r)])
        rhs = mpmath.matrix([to_mpf(g[i]) for i in range(r)])
        w = mpmath.lu_solve(v, rhs)
        weights = [w[i] for i in range(r)]
    if any(wi <= 0 for wi in weights):
        raise ExtractionError("nonpositive weight from the Vandermonde system")
    return LineMeasure(list(zip(xs, weights)), [None] * r, prec)


def extract_line_measure(g: Sequence, avoid_zero: bool = False, precision_bits: int = 256) -> LineMeasure:
    """A (Rank A_gamma)-atomic measure for a representable sequence."""
    g = list(g)
    m = len(g) // 2
    full = ldl_psd(hankel(g))
    if not full.psd:
        raise ExtractionError("A_gamma is not psd")
    r = full.rank
    if r == 0:
        return LineMeasure([], [], precision_bits)
    rc = ldl_psd(corner(g, m)).rank if m else 0
    if rc == r:
        return _flat_extract(g, r, precision_bits, avoid_zero)
    if r != m + 1:
        raise ExtractionError("sequence is not representable (rank jump)")
    # A_gamma is pd: extend by one step to a flat sequence of the same rank
    a = hankel(g)
    ap = pinv(a)
    last_error = None
    for s in (Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-2)):
        b = g[m + 1:] + [s]
        ext = g + [s, _dot(b, matvec(ap, b))]
        try:
            return _flat_extract(ext, r, precision_bits, avoid_zero)
        except ExtractionError as e:
            last_error = e
    raise ExtractionError(f"no flat extension avoided the failure: {last_error}")

"""Ground truth for the solvers: exact moments of known atomic measures.

Random measures put atoms on the line y = 0 and on the conic factor of the
chosen cubic using rational parametrizations, so every generated sequence is
a YES instance by construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .momentseq import BivSeq, CurveType, index_pairs
from .ratlinalg import to_mpf


@dataclass(frozen=True)
class Atom:
    x: Fraction
    y: Fraction
    w: Fraction
    part: str  # "line" or "conic"


@dataclass(frozen=True)
class GroundTruth:
    curve: CurveType
    atoms: tuple
    moments: BivSeq
    seed: int


def forward_moments(atoms, k: int) -> BivSeq:
    """beta_{i,j} = sum w x^i y^j, exactly.  atoms are (x, y, w) triples or Atom."""
    triples = [(a.x, a.y, a.w) if isinstance(a, Atom) else tuple(a) for a in atoms]
    out = {}
    for (i, j) in index_pairs(2 * k):
        out[(i, j)] = sum((Fraction(w) * Fraction(x) ** i * Fraction(y) ** j for x, y, w in triples),
                          Fraction(0))
    return BivSeq(k, out)


def on_curve(curve: CurveType, x, y) -> bool:
    return riesz_point(curve.cubic(), x, y) == 0


def riesz_point(poly, x, y):
    return sum((c * Fraction(x) ** i * Fraction(y) ** j for (i, j), c in poly.items()), Fraction(0))


def _small_rational(rng: random.Random, height: int) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def conic_point(curve: CurveType, r: Fraction):
    """A point on the conic factor from a rational parameter, or None if r is excluded."""
    if curve.tag == "hyp1":
        if r == 0:
            return None
        return (r, 1 / r)
    if curve.tag == "hyp2":
        # x + y + a xy = 0  =>  y = -x / (1 + a x)
        den = 1 + curve.a * r
        if den == 0:
            return None
        return (r, -r / den)
    # ay + x^2 - y^2 = 0 is the image of XY = 1 under an affine map
    if r == 0:
        return None
    a = curve.a
    return (a * (r - 1 / r) / 4, a * (2 - r - 1 / r) / 4)


def random_curve_measure(curve: CurveType, n_line: int, n_conic: int, seed: int,
                         height: int = 9) -> GroundTruth:
    """Distinct atoms with small-height rational coordinates and weights."""
    rng = random.Random(seed)
    seen = set()
    atoms = []

    def weight():
        return Fraction(rng.randint(1, height), rng.randint(1, height))

    while sum(1 for a in atoms if a.part == "line") < n_line:
        x = _small_rational(rng, height)
        if (x, 0) in seen:
            continue
        seen.add((x, Fraction(0)))
        atoms.append(Atom(x, Fraction(0), weight(), "line"))
    while sum(1 for a in atoms if a.part == "conic") < n_conic:
        pt = conic_point(curve, _small_rational(rng, height))
        if pt is None or pt in seen:
            continue
        seen.add(pt)
        atoms.append(Atom(pt[0], pt[1], weight(), "conic"))
    return GroundTruth(curve, tuple(atoms), None, seed)


def with_moments(gt: GroundTruth, k: int) -> GroundTruth:
    return GroundTruth(gt.curve, gt.atoms, forward_moments(gt.atoms, k), gt.seed)


def random_instance(curve: CurveType, k: int, n_line: int, n_conic: int, seed: int,
                    height: int = 9) -> GroundTruth:
    return with_moments(random_curve_measure(curve, n_line, n_conic, seed, height), k)


@dataclass(frozen=True)
class CompareReport:
    equal: bool
    max_deviation: object


def compare(s1: BivSeq, s2: BivSeq, mode: str = "exact", tol="1e-30") -> CompareReport:
    """Exact equality, or max |a - b| / max(1, |b|) against tol."""
    if s1.k != s2.k:
        raise ValueError("sequences have different degrees")
    if mode == "exact":
        diff = [(ij, s1[ij] - s2[ij]) for ij in index_pairs(s1.degree)]
        worst = max((abs(d) for _ij, d in diff), default=Fraction(0))
        return CompareReport(worst == 0, worst)
    with mpmath.workprec(320):
        worst = mpmath.mpf(0)
        for ij in index_pairs(s1.degree):
            a, b = to_mpf(s1[ij]), to_mpf(s2[ij])
            worst = max(worst, abs(a - b) / max(mpmath.mpf(1), abs(b)))
        return CompareReport(worst <= mpmath.mpf(tol), worst)

"""Generate random measures on each cubic, solve their moments, and report.

Run from the repository root:  python3 demos/round_trip.py [count]
"""

import collections
import random
import sys

from cubicmoment.cli import solve
from cubicmoment.momentseq import CurveType, moment_matrix
from cubicmoment.oracle import random_instance
from cubicmoment.ratlinalg import rank


def main(count):
    curves = [CurveType.hyp1(), CurveType.hyp2(-1), CurveType.hyp3(2)]
    rng = random.Random(2024)
    for curve in curves:
        extra = collections.Counter()
        worst = 0
        for _ in range(count):
            gt = random_instance(curve, 3, rng.randint(0, 3), rng.randint(0, 7), rng.randrange(10 ** 9), height=6)
            rep = solve(gt.moments, curve)
            extra[rep.minimal_atoms - rank(moment_matrix(gt.moments).m)] += 1
            worst = max(worst, rep.measure.residual(gt.moments))
        print(f"{curve.tag}: {count} YES instances, minimal - Rank M: {dict(sorted(extra.items()))}, "
              f"worst residual {float(worst):.1e}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 30)

"""Decide, count and build measures for the three stored worked examples.

Run from the repository root:  python3 demos/worked_examples.py
"""

import os
import time

import mpmath

from cubicmoment.cli import load_instance, solve
from cubicmoment.momentseq import moment_matrix
from cubicmoment.ratlinalg import rank, to_mpf

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "tests", "data")


def show(name):
    s, curve = load_instance(os.path.join(DATA, name + ".json"))
    start = time.perf_counter()
    rep = solve(s, curve)
    took = time.perf_counter() - start
    label = curve.tag if curve.tag == "hyp1" else f"{curve.tag}, a = {curve.a}"
    print(f"{name}  ({label})")
    print(f"  Rank M(3) = {rank(moment_matrix(s).m)}")
    if not rep.exists:
        print(f"  NO: {rep.failure_certificate}")
    else:
        print(f"  YES via {rep.branch}; minimal atoms {rep.minimal_atoms}")
        if rep.witness is not None:
            print("  witness (t, u) ~ " + ", ".join(mpmath.nstr(to_mpf(v, 128), 20) for v in rep.witness))
        print(f"  built {len(rep.measure)} atoms, residual {mpmath.nstr(rep.measure.residual(s), 3)}")
        for x, y, w in rep.measure.atoms:
            print(f"    ({mpmath.nstr(x, 12)}, {mpmath.nstr(y, 12)})  weight {mpmath.nstr(w, 12)}")
    print(f"  {took:.2f} s\n")


if __name__ == "__main__":
    for name in ("type1_indefinite", "type1_corrected", "type2_example", "type3_example"):
        show(name)

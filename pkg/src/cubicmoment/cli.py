"""Command-line interface and JSON serialization.

Instance files hold exact rationals as strings:

    {"degree": 6, "curve": {"type": "hyp2", "a": "-1"},
     "moments": [{"i": 0, "j": 0, "value": "1"}, ...]}

Measure files hold decimal strings plus the working precision:

    {"precision_bits": 256, "exact": false,
     "atoms": [{"x": "...", "y": "...", "w": "..."}], ...}

Exit codes: 0 YES / pass, 1 NO, 2 invalid input, 3 residual above tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import mpmath

from . import hamburger, oracle, type1, type2, type3
from .decompose import PreconditionError, SolveReport
from .momentseq import BivSeq, CurveType, affine_apply, index_pairs
from .ratlinalg import QuadExt, to_mpf

EXIT_YES = 0
EXIT_NO = 1
EXIT_INVALID = 2
EXIT_RESIDUAL = 3


class InputError(ValueError):
    """A malformed instance or measure file; the message names the field."""


# ---------------------------------------------------------------- parsing

def parse_rational(text, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise InputError(f"{where}: expected a rational string like \"p/q\", got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"{where}: cannot parse {text!r} as a rational ({e})") from None


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def parse_curve(obj) -> CurveType:
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError("curve: expected an object with a \"type\" field")
    tag = obj["type"]
    if tag == "hyp1":
        return CurveType.hyp1()
    if tag not in ("hyp2", "hyp3"):
        raise InputError(f"curve.type: expected hyp1, hyp2 or hyp3, got {tag!r}")
    if "a" not in obj:
        raise InputError(f"curve.a: required for {tag}")
    a = parse_rational(obj["a"], "curve.a")
    if a == 0:
        raise InputError("curve.a: must be nonzero (the cubic is reducible in a different way)")
    return CurveType.hyp2(a) if tag == "hyp2" else CurveType.hyp3(a)


def parse_instance(obj) -> tuple[BivSeq, CurveType]:
    if not isinstance(obj, dict):
        raise InputError("instance: expected a JSON object")
    for key in ("degree", "curve", "moments"):
        if key not in obj:
            raise InputError(f"instance: missing field {key!r}")
    deg = obj["degree"]
    if isinstance(deg, bool) or not isinstance(deg, int) or deg < 6 or deg % 2:
        raise InputError(f"degree: expected an even integer >= 6, got {deg!r}")
    curve = parse_curve(obj["curve"])
    if not isinstance(obj["moments"], list):
        raise InputError("moments: expected a list")
    beta = {}
    for n, m in enumerate(obj["moments"]):
        where = f"moments[{n}]"
        if not isinstance(m, dict) or not {"i", "j", "value"} <= set(m):
            raise InputError(f"{where}: expected an object with fields i, j, value")
        i, j = m["i"], m["j"]
        if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (i, j)):
            raise InputError(f"{where}: i and j must be nonnegative integers")
        if i + j > deg:
            raise InputError(f"{where}: i + j = {i + j} exceeds degree {deg}")
        if (i, j) in beta:
            raise InputError(f"{where}: duplicate moment ({i}, {j})")
        beta[(i, j)] = parse_rational(m["value"], f"{where}.value")
    missing = [ij for ij in index_pairs(deg) if ij not in beta]
    if missing:
        raise InputError(f"moments: missing entries, first is (i, j) = {missing[0]}")
    return BivSeq(deg // 2, beta), curve


def load_instance(path: str) -> tuple[BivSeq, CurveType]:
    return parse_instance(_load_json(path))


def parse_measure(obj) -> tuple[list, bool, int]:
    """Atoms as exact Fractions (decimal strings parse exactly), the exact flag, precision."""
    if not isinstance(obj, dict) or not isinstance(obj.get("atoms"), list):
        raise InputError("measure: expected an object with an \"atoms\" list")
    atoms = []
    for n, a in enumerate(obj["atoms"]):
        if not isinstance(a, dict):
            raise InputError(f"atoms[{n}]: expected an object")
        atoms.append(tuple(parse_rational(a.get(key), f"atoms[{n}].{key}") for key in ("x", "y", "w")))
    return atoms, bool(obj.get("exact", False)), int(obj.get("precision_bits", 256))


# ---------------------------------------------------------------- serialization

def _rat(x: Fraction) -> str:
    return str(Fraction(x))


def _curve_json(curve: CurveType) -> dict:
    out = {"type": curve.tag}
    if curve.tag != "hyp1":
        out["a"] = _rat(curve.a)
    return out


def instance_json(s: BivSeq, curve: CurveType) -> dict:
    return {"degree": s.degree, "curve": _curve_json(curve),
            "moments": [{"i": i, "j": j, "value": _rat(s[(i, j)])} for i, j in index_pairs(s.degree)]}


def dumps(obj) -> str:
    """Canonical text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _digits(bits: int) -> int:
    return max(1, math.ceil(bits * math.log10(2)))


def decimal(x, bits: int) -> str:
    with mpmath.workprec(bits):
        v = x if isinstance(x, mpmath.mpf) else to_mpf(x, bits)
        return mpmath.nstr(v, _digits(bits))


def scalar_json(x, bits: int = 256):
    """Exact scalars keep an exact form; QuadExt also gets a decimal approximation."""
    if isinstance(x, Fraction) or isinstance(x, int):
        return _rat(x)
    if isinstance(x, QuadExt):
        return {"exact": str(x), "approx": decimal(x, bits)}
    return decimal(x, bits)


def measure_json(meas, bits: int, residual=None, tol=None) -> dict:
    atoms = [{"x": decimal(x, bits), "y": decimal(y, bits), "w": decimal(w, bits)} for x, y, w in meas.atoms]
    out = {"precision_bits": bits, "exact": False, "atoms": atoms}
    if meas.exact and all(e is not None for e in meas.exact):
        out["exact_atoms"] = [{"x": _rat(x), "y": _rat(y), "w": _rat(w)} for x, y, w in meas.exact]
    if residual is not None:
        out["residual"] = mpmath.nstr(residual, 8)
    if tol is not None:
        out["tol"] = str(tol)
    return out


def ground_truth_json(gt: oracle.GroundTruth) -> dict:
    return {"exact": True, "precision_bits": 0, "seed": gt.seed, "curve": _curve_json(gt.curve),
            "atoms": [{"x": _rat(a.x), "y": _rat(a.y), "w": _rat(a.w), "part": a.part} for a in gt.atoms]}


def report_json(rep: SolveReport, bits: int = 256) -> dict:
    return {"exists": rep.exists,
            "minimal_atoms": rep.minimal_atoms,
            "witness": None if rep.witness is None else [scalar_json(v, bits) for v in rep.witness],
            "certificate": rep.failure_certificate if not rep.exists else rep.branch}


# ---------------------------------------------------------------- dispatch

def solve(s: BivSeq, curve: CurveType, construct: bool = True, precision_bits: int = 256,
          tol="1e-25") -> SolveReport:
    """Route a sequence to the solver of its curve type."""
    if curve.tag == "hyp1":
        return type1.solve_type1(s, construct=construct, precision_bits=precision_bits, tol=tol)
    if curve.tag == "hyp2":
        return type2.solve_type2(s, curve.a, construct=construct, precision_bits=precision_bits, tol=tol)
    return type3.solve_type3(s, curve.a, construct=construct, precision_bits=precision_bits, tol=tol)


# ---------------------------------------------------------------- commands

def _emit(obj, out_path=None):
    text = dumps(obj)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_decide(args) -> int:
    s, curve = load_instance(args.path)
    rep = solve(s, curve, construct=False)
    _emit(report_json(rep, args.precision), args.out)
    return EXIT_YES if rep.exists else EXIT_NO


def cmd_solve(args) -> int:
    s, curve = load_instance(args.path)
    try:
        rep = solve(s, curve, construct=True, precision_bits=args.precision, tol=args.tol)
    except hamburger.ExtractionError as e:
        _emit({"exists": True, "error": f"construction failed: {e}"}, args.out)
        return EXIT_RESIDUAL
    if not rep.exists:
        _emit(report_json(rep, args.precision), args.out)
        return EXIT_NO
    res = rep.measure.residual(s)
    body = report_json(rep, args.precision)
    body["measure"] = measure_json(rep.measure, args.precision, res, args.tol)
    _emit(body, args.out)
    return EXIT_YES if res <= mpmath.mpf(args.tol) else EXIT_RESIDUAL


def cmd_verify(args) -> int:
    s, _curve = load_instance(args.path)
    obj = _load_json(args.measure_path)
    atoms, exact, _bits = parse_measure(obj.get("measure", obj))
    rec = oracle.forward_moments(atoms, s.k)
    cmp = oracle.compare(rec, s, mode="exact" if exact else "tol", tol=args.tol)
    _emit({"pass": cmp.equal, "mode": "exact" if exact else "tol",
           "max_deviation": scalar_json(cmp.max_deviation, 64)}, args.out)
    return EXIT_YES if cmp.equal else EXIT_RESIDUAL


def _parse_counts(text: str) -> tuple[int, int]:
    # "2+4" means 2 atoms on the line and 4 on the conic
    try:
        n_line, n_conic = (int(p) for p in text.split("+"))
    except ValueError:
        raise InputError(f"counts: expected \"line+conic\" like 2+4, got {text!r}") from None
    if n_line < 0 or n_conic < 0:
        raise InputError("counts: atom counts must be nonnegative")
    return n_line, n_conic


def cmd_generate(args) -> int:
    curve = parse_curve({"type": args.curve, **({"a": args.a} if args.a is not None else {})})
    n_line, n_conic = _parse_counts(args.counts)
    if args.degree < 6 or args.degree % 2:
        raise InputError(f"degree: expected an even integer >= 6, got {args.degree}")
    gt = oracle.random_instance(curve, args.degree // 2, n_line, n_conic, args.seed)
    inst = dumps(instance_json(gt.moments, curve))
    truth = dumps(ground_truth_json(gt))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(inst)
        with open(truth_path(args.out), "w", encoding="utf-8") as fh:
            fh.write(truth)
    else:
        sys.stdout.write(inst)
    return EXIT_YES


def truth_path(instance_path: str) -> str:
    stem = instance_path[:-5] if instance_path.endswith(".json") else instance_path
    return stem + ".truth.json"


def cmd_transform(args) -> int:
    s, curve = load_instance(args.path)
    coeffs = [parse_rational(v, f"coefficient {name}") for v, name in zip(args.coeffs, "abcdef")]
    if coeffs[1] * coeffs[5] - coeffs[2] * coeffs[4] == 0:
        raise InputError("transform: the linear part b*f - c*e must be nonzero")
    t = affine_apply(s, *coeffs)
    if args.curve:
        curve = parse_curve({"type": args.curve, **({"a": args.a} if args.a is not None else {})})
    _emit(instance_json(t, curve), args.out)
    return EXIT_YES


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubicmoment",
                                description="Exact truncated moment problems on hyperbolic reducible cubics.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=256, help="working precision in bits (default 256)")
    common.add_argument("--tol", default="1e-25", help="relative residual tolerance (default 1e-25)")
    common.add_argument("--out", help="write JSON here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decide", parents=[common], help="decide existence and the minimal atom count")
    d.add_argument("path")
    d.set_defaults(func=cmd_decide)

    s = sub.add_parser("solve", parents=[common], help="build a verified atomic measure")
    s.add_argument("path")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check a measure file against an instance")
    v.add_argument("path")
    v.add_argument("measure_path")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", parents=[common], help="write a random YES instance and its ground truth")
    g.add_argument("curve", choices=["hyp1", "hyp2", "hyp3"])
    g.add_argument("counts", help="atoms as line+conic, for example 2+4")
    g.add_argument("--a", help="curve coefficient for hyp2 and hyp3")
    g.add_argument("--degree", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("transform", parents=[common],
                       help="push moments forward by (x, y) -> (a + bx + cy, d + ex + fy)")
    t.add_argument("path")
    t.add_argument("coeffs", nargs=6, metavar="a..f")
    t.add_argument("--curve", choices=["hyp1", "hyp2", "hyp3"], help="curve label for the output file")
    t.add_argument("--a", help="curve coefficient for the output label")
    t.set_defaults(func=cmd_transform)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with mpmath.workprec(max(53, getattr(args, "precision", 256))):
            return args.func(args)
    except (InputError, PreconditionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

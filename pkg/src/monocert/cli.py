"""Command-line front end.

Exit codes: 0 conclusion true, 1 I/O or format error, 2 hypothesis
failure, 3 conclusion false (a certificate is printed).
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import formats
from .convexpoly import (
    MaxAffineFunction,
    epigraph_conditions,
    normal_cone_generators,
    normal_cone_member,
    subdifferential,
    support_face,
)
from .errors import FormatError, MonocertError, NotCyclicallyMonotone
from .exactgeom import INF, HPolyhedron, RatVec, VPolyhedron, as_rat, cone_member, format_rat, support_value
from .instances import sample_points
from .operators import FiniteOperator, is_cyclically_monotone, is_monotone, rockafellar_potential
from .selftest import run_selftest
from .theorems import (
    EXIT_CONCLUSION,
    EXIT_HYPOTHESIS,
    EXIT_IO,
    EXIT_OK,
    CheckReport,
    check_cor_basic2,
    check_cor_normal_epi,
    check_lemma_char_epi,
    check_lemma_lambda,
    check_prop_basic,
    check_prop_basic3,
    check_thm_main,
    check_thm_normal_cones,
    check_thm_sublinear,
    lift_AX,
    minty_sample,
    rationalize_supply,
)

RESULT_NAMES = ("Prop2.1", "Cor2.2", "Thm2.3", "Thm2.5", "Lem3.1", "Lem3.2",
                "Cor3.3", "Prop3.4", "Thm3.5")


class UsageError(FormatError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20, help="sampled points per instance")
    p.add_argument("--grid", type=int, default=3, help="integer grid radius for subgradient cross-checks")
    p.add_argument("--minty-samples", type=int, default=50)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="monocert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    for verb in ("check-monotone", "check-cyclic"):
        p = sub.add_parser(verb)
        p.add_argument("operator")
        _common(p)
    p = sub.add_parser("potential")
    p.add_argument("operator")
    p.add_argument("--base", type=int, default=0)
    _common(p)
    for verb in ("subdiff", "lift-ax"):
        p = sub.add_parser(verb)
        p.add_argument("function")
        p.add_argument("--point", required=True)
        _common(p)
    p = sub.add_parser("normal-cone")
    p.add_argument("set")
    p.add_argument("--point", required=True)
    p.add_argument("--dual")
    _common(p)
    p = sub.add_parser("support")
    p.add_argument("set")
    p.add_argument("--dual", required=True)
    _common(p)
    p = sub.add_parser("epi-conditions")
    p.add_argument("set")
    _common(p)
    p = sub.add_parser("verify")
    p.add_argument("--result", required=True, choices=RESULT_NAMES)
    p.add_argument("--operator")
    p.add_argument("--function")
    p.add_argument("--set")
    p.add_argument("--point", action="append", help="sample point (repeatable)")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--dual")
    _common(p)
    p = sub.add_parser("rationalize")
    p.add_argument("operator")
    p.add_argument("--set", help="explicit production set to test against")
    _common(p)
    p = sub.add_parser("minty")
    p.add_argument("set")
    _common(p)
    p = sub.add_parser("selftest")
    p.add_argument("--sizes", type=int, help="instances per suite (default: the acceptance counts)")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    _common(p)
    return parser


# ---------------------------------------------------------------------------
# loading


def _operator(path) -> FiniteOperator:
    return formats.operator_from_json(formats.load_json(path))


def _function(path) -> MaxAffineFunction:
    return formats.function_from_json(formats.load_json(path))


def _set(path):
    return formats.set_from_json(formats.load_json(path))


def _vset(path) -> VPolyhedron:
    C = _set(path)
    if not isinstance(C, VPolyhedron):
        raise FormatError(f"{path}: expected a vertex/ray set")
    return C


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for this result")


def _point(text: str, dim: int) -> RatVec:
    v = formats.parse_vector(text)
    if v.dim != dim:
        raise FormatError(f"point {text!r} has {v.dim} coordinates, expected {dim}")
    return v


# ---------------------------------------------------------------------------
# output


def _show(value) -> str:
    if isinstance(value, RatVec):
        return str(value)
    if value == INF and isinstance(value, float):
        return "+inf"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if hasattr(value, "numerator") and not isinstance(value, bool):
        return format_rat(value)
    return json.dumps(formats.to_jsonable(value), ensure_ascii=False)


def render_report(rep: CheckReport, indent: str = "") -> str:
    lines = [f"{indent}result: {rep.result_id}  (seed {rep.deterministic_seed})"]
    for h in rep.hypotheses:
        status = "holds" if h.holds else "FAILS"
        extra = "" if h.holds or h.witness is None else f"  witness: {_show(h.witness)}"
        lines.append(f"{indent}  hypothesis {h.name}: {status}{extra}")
    if rep.hypotheses_hold:
        lines.append(f"{indent}  conclusion: {'true' if rep.conclusion else 'FALSE'}")
        bad = [c for c in rep.certificates if c.get("holds") is False]
        lines.append(f"{indent}  certificates: {len(rep.certificates)} ({len(bad)} failing)")
        for c in bad[:5]:
            lines.append(f"{indent}    {_show(c)}")
    else:
        lines.append(f"{indent}  conclusion: skipped (hypothesis failure)")
    for ev in rep.evidence:
        lines.append(f"{indent}  evidence:")
        lines.append(render_report(ev, indent + "    "))
    return "\n".join(lines)


class Output:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, text: str, data) -> None:
        if self.as_json:
            sys.stdout.write(formats.dumps(data))
        else:
            sys.stdout.write(text.rstrip("\n") + "\n")

    def report(self, rep: CheckReport) -> int:
        self.emit(render_report(rep) + f"\nexit: {rep.exit_code}", rep)
        return rep.exit_code


# ---------------------------------------------------------------------------
# verbs


def cmd_check_monotone(args, out: Output) -> int:
    T = _operator(args.operator)
    verdict = is_monotone(T)
    if verdict is True:
        out.emit(f"monotone: true ({len(T)} pairs)", {"monotone": True, "pairs": len(T)})
        return EXIT_OK
    text = (f"monotone: FALSE\n  pairs {verdict.i} and {verdict.j}: "
            f"<x1 - x2, x1* - x2*> = {format_rat(verdict.gap)}")
    out.emit(text, {"monotone": False, "certificate": verdict,
                    "recomputed_gap": verdict.recompute()})
    return EXIT_CONCLUSION


def cmd_check_cyclic(args, out: Output) -> int:
    T = _operator(args.operator)
    verdict = is_cyclically_monotone(T)
    if verdict is True:
        out.emit(f"cyclically monotone: true ({len(T)} pairs)",
                 {"cyclically_monotone": True, "pairs": len(T)})
        return EXIT_OK
    idx = list(verdict.indices)
    path = " -> ".join(str(i) for i in idx + idx[:1])
    lines = [f"cyclically monotone: FALSE", f"  cycle {path}, sum {format_rat(verdict.cycle_sum)}"]
    for i, (x, xs) in zip(idx, verdict.pairs):
        lines.append(f"    pair {i}: x = {x}, x* = {xs}")
    out.emit("\n".join(lines), {"cyclically_monotone": False, "certificate": verdict,
                                "recomputed_sum": verdict.recompute()})
    return EXIT_CONCLUSION


def cmd_potential(args, out: Output) -> int:
    T = _operator(args.operator)
    try:
        f = rockafellar_potential(T, args.base)
    except NotCyclicallyMonotone as exc:
        v = exc.violation
        out.emit(f"NotCyclicallyMonotone: cycle {list(v.indices)} with sum {format_rat(v.cycle_sum)}",
                 {"error": "NotCyclicallyMonotone", "certificate": v})
        return EXIT_HYPOTHESIS
    lines = ["potential f(x) = max of:"]
    for a, b in f.pieces:
        lines.append(f"  <{a}, x> + {format_rat(b)}")
    out.emit("\n".join(lines), {"function": f, "base": args.base})
    return EXIT_OK


def cmd_subdiff(args, out: Output) -> int:
    f = _function(args.function)
    x = _point(args.point, f.dim)
    S = subdifferential(f, x)
    out.emit("subdifferential at " + str(x) + " = conv{" + ", ".join(map(str, S.vertices)) + "}",
             {"point": x, "subdifferential": S})
    return EXIT_OK


def cmd_lift_ax(args, out: Output) -> int:
    f = _function(args.function)
    x = _point(args.point, f.dim)
    S = lift_AX(f, x)
    out.emit("A_X slice at " + str(x) + " = conv{" + ", ".join(map(str, S.vertices)) + "}",
             {"point": x, "slice": S})
    return EXIT_OK


def cmd_normal_cone(args, out: Output) -> int:
    C = _set(args.set)
    x = _point(args.point, C.dim)
    if isinstance(C, HPolyhedron):
        gens = normal_cone_generators(C, x)
        data = {"point": x, "generators": gens}
        text = f"normal cone at {x} = cone{{{', '.join(map(str, gens))}}}"
        if args.dual is not None:
            d = _point(args.dual, C.dim)
            data["dual"], data["member"] = d, cone_member(d, gens)
            text += f"\n{d} member: {str(data['member']).lower()}"
        out.emit(text, data)
        return EXIT_CONCLUSION if data.get("member") is False else EXIT_OK
    if args.dual is None:
        raise UsageError("--dual is required for a vertex/ray set")
    d = _point(args.dual, C.dim)
    member = normal_cone_member(C, x, d)
    out.emit(f"{d} in N_C({x}): {str(member).lower()}", {"point": x, "dual": d, "member": member})
    return EXIT_OK if member else EXIT_CONCLUSION


def cmd_support(args, out: Output) -> int:
    C = _vset(args.set)
    d = _point(args.dual, C.dim)
    sv = support_value(C, d)
    data = {"dual": d, "support_value": sv}
    text = f"support value at {d}: {_show(sv)}"
    if sv != INF:
        face = support_face(C, d)
        data["face"] = face
        text += "\nmaximizing face: conv{" + ", ".join(map(str, face.vertices)) + "}"
        if face.rays:
            text += " + cone{" + ", ".join(map(str, face.rays)) + "}"
    out.emit(text, data)
    return EXIT_OK


def cmd_epi_conditions(args, out: Output) -> int:
    C = _set(args.set)
    rep = epigraph_conditions(C)
    text = "\n".join(f"condition {name}: {str(val).lower()}" for name, val in
                     (("i", rep.cond_i), ("ii", rep.cond_ii), ("iii", rep.cond_iii)))
    out.emit(text, rep)
    return EXIT_OK if rep.all_hold else EXIT_HYPOTHESIS


def cmd_verify(args, out: Output) -> int:
    r = args.result
    if r in ("Prop2.1", "Cor2.2", "Thm2.5", "Prop3.4"):
        _require(args, "operator")
        T = _operator(args.operator)
        rep = {
            "Prop2.1": lambda: check_prop_basic(T, args.seed),
            "Cor2.2": lambda: check_cor_basic2(T, args.seed),
            "Thm2.5": lambda: check_thm_sublinear(T, args.minty_samples, args.seed),
            "Prop3.4": lambda: check_prop_basic3(T, args.grid, args.seed),
        }[r]()
    elif r == "Thm2.3":
        if args.operator is None and args.set is None:
            raise UsageError("--operator or --set is required for Thm2.3")
        T = _operator(args.operator) if args.operator else None
        C = _vset(args.set) if args.set and T is None else None
        rep = check_thm_normal_cones(T, C, args.minty_samples, args.seed)
    elif r == "Lem3.1":
        _require(args, "set")
        rep = check_lemma_char_epi(_vset(args.set), args.seed)
    elif r == "Lem3.2":
        _require(args, "function", "point", "lam", "dual")
        f = _function(args.function)
        rep = check_lemma_lambda(f, _point(args.point[0], f.dim), _rat_arg(args.lam),
                                 _point(args.dual, f.dim), args.seed)
    else:
        _require(args, "function")
        f = _function(args.function)
        if args.point:
            xs = [_point(p, f.dim) for p in args.point]
        else:
            xs = sample_points(random.Random(args.seed), f.dim, args.samples)
        check = check_cor_normal_epi if r == "Cor3.3" else check_thm_main
        rep = check(f, xs, args.seed)
    return out.report(rep)


def _rat_arg(text: str):
    try:
        return as_rat(text)
    except (TypeError, ValueError):
        raise FormatError(f"not a rational: {text!r}") from None


def cmd_rationalize(args, out: Output) -> int:
    T = _operator(args.operator)
    Y = _vset(args.set) if args.set else None
    return out.report(rationalize_supply(T, Y, args.seed))


def cmd_minty(args, out: Output) -> int:
    C = _vset(args.set)
    return out.report(minty_sample(C, count=args.minty_samples, seed=args.seed))


def cmd_selftest(args, out: Output) -> int:
    if args.sizes is not None and args.sizes < 0:
        raise UsageError("--sizes must be nonnegative")
    if args.sizes == 0:
        print("warning: --sizes 0 runs no instances; the pass is vacuous", file=sys.stderr)
    result = run_selftest(args.seed, args.sizes, args.minty_samples, args.samples,
                          fault=args.inject_fault)
    lines = [f"selftest seed {result['seed']}"]
    for s in result["suites"]:
        status = "PASS" if s["failed"] == 0 else "FAIL"
        lines.append(f"  {status} {s['suite']} [{', '.join(s['results'])}]: "
                     f"{s['passed']}/{s['total']}")
        if s["counterexample"] is not None:
            lines.append("    counterexample: " + json.dumps(formats.to_jsonable(s["counterexample"])))
    lines.append("all suites pass" if result["passed"] else "FAILURES")
    out.emit("\n".join(lines), result)
    return EXIT_OK if result["passed"] else EXIT_CONCLUSION


COMMANDS = {
    "check-monotone": cmd_check_monotone,
    "check-cyclic": cmd_check_cyclic,
    "potential": cmd_potential,
    "subdiff": cmd_subdiff,
    "lift-ax": cmd_lift_ax,
    "normal-cone": cmd_normal_cone,
    "support": cmd_support,
    "epi-conditions": cmd_epi_conditions,
    "verify": cmd_verify,
    "rationalize": cmd_rationalize,
    "minty": cmd_minty,
    "selftest": cmd_selftest,
}


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.verb](args, Output(args.json))
    except MonocertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

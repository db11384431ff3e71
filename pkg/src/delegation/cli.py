"""``delegate`` command line: generate, solve, robustify and verify instances.

Exit codes: 0 success, 1 usage or input error, 2 infeasible or violated, 3 size guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .continuous import FamilyError, load_family, named_family, solve_continuous, FAMILIES
from .exact import as_fraction, format_rational
from .generators import GraphSpec, gen_hardness, gen_random, gen_randomized_gap, gen_single_bad
from .instance import FormatError, instance_to_dict, load_instance, load_menu, menu_to_dict, validate_instance
from .oracle import SizeGuardError, brute_force_opt_k, verify_menu
from .pricing import (
    NotIncentiveCompatible,
    evaluate,
    menu_to_pricing,
    pricing_to_menu,
    solution_from_dict,
    solution_to_dict,
    solve_menu_k,
)
from .randomized import menu_from_dict as rand_from_dict
from .randomized import menu_to_dict as rand_to_dict
from .randomized import solve_randomized, verify_randomized
from .robust import RobustnessParams, robustify, verify_approx

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_GUARD = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-i", "--instance", default="-", help="instance JSON (default: stdin)")
    common.add_argument("-o", "--output", default="-", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="delegate", description="Exact solvers for delegation menus.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("family", choices=("single-bad", "randomized-gap", "hardness", "random"))
    g.add_argument("--n", type=_positive_int, default=2)
    g.add_argument("--m", type=_positive_int, default=2)
    g.add_argument("--ell", type=_positive_int, default=2)
    g.add_argument("--vertices", type=_positive_int, default=2, help="hardness: vertex count M")
    g.add_argument("--edges", default="", help="hardness: edges as '1-2,2-3'")

    s = sub.add_parser("solve-det", parents=[common], help="optimal deterministic menu with k items")
    s.add_argument("--k", type=_positive_int)
    s.add_argument("--eps", type=_rational, default=Fraction(0))

    sub.add_parser("solve-rand", parents=[common], help="optimal randomized menu")

    c = sub.add_parser("solve-cont", parents=[common], help="continuous-action pipeline")
    c.add_argument("--delta", type=_rational, required=True)
    c.add_argument("--family", default="toy", help=f"one of {sorted(FAMILIES)} or a tabulated JSON file")
    c.add_argument("--rewards", default="1,0", help="per-type reward vectors, e.g. '1,0;0,1'")
    c.add_argument("--type-dist", default=None, help="e.g. '1/2,1/2' (default uniform)")

    r = sub.add_parser("robustify", parents=[common], help="robustify a menu against reward error")
    r.add_argument("-m", "--menu", required=True)
    r.add_argument("--delta", type=_rational, required=True)
    r.add_argument("--eps", type=_rational, default=Fraction(0))

    v = sub.add_parser("verify", parents=[common], help="check a menu against an instance")
    v.add_argument("-m", "--menu", required=True)

    o = sub.add_parser("oracle", parents=[common], help="brute-force optimum for small instances")
    o.add_argument("--k", type=_positive_int, required=True)
    o.add_argument("--limit", type=_positive_int, default=10**6)

    sub.add_parser("compare", parents=[common], help="OPT_k for every k and the randomized optimum")
    return p


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _approx(x: Fraction) -> str:
    return f"~{float(x):.6g}"


def _emit(args, doc: dict, table: Optional[list[tuple[str, object]]] = None) -> None:
    if args.format == "table" and table is not None:
        lines = []
        for key, val in table:
            if isinstance(val, Fraction):
                lines.append(f"{key:<24} {format_rational(val):<28} {_approx(val)} (approx)")
            else:
                lines.append(f"{key:<24} {val}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(doc, indent=1) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def _instance(args):
    inst = load_instance(_read(args.instance))
    rep = validate_instance(inst)
    if not rep.ok:
        raise FormatError("; ".join(rep.issues), "instance")
    return inst


def cmd_gen(args) -> int:
    extra = {}
    if args.family == "single-bad":
        inst = gen_single_bad(args.n)
    elif args.family == "randomized-gap":
        if args.n % 2:
            raise UsageError("randomized-gap needs an even --n")
        inst = gen_randomized_gap(args.n)
    elif args.family == "hardness":
        edges = []
        for part in filter(None, args.edges.split(",")):
            try:
                u, v = part.split("-")
                edges.append((int(u), int(v)))
            except ValueError:
                raise UsageError(f"bad edge {part!r}") from None
        inst, beta = gen_hardness(GraphSpec(args.vertices, tuple(edges)))
        extra["beta"] = format_rational(beta)
    else:
        inst = gen_random(args.n, args.m, args.ell, args.seed)
    doc = instance_to_dict(inst)
    doc.update(extra)
    _emit(args, doc, [("types", inst.n), ("outcomes", inst.m), ("actions", inst.ell)])
    return EXIT_OK


def cmd_solve_det(args) -> int:
    inst = _instance(args)
    k = args.k or min(inst.n, inst.ell)
    rep = solve_menu_k(inst, k, eps=args.eps, threads=args.threads)
    menu = pricing_to_menu(inst, rep.solution)
    doc = menu_to_dict(inst, menu, rep.value)
    doc["k"] = k
    doc["pricing"] = solution_to_dict(inst, rep.solution, rep.value)
    table = [("k", k), ("value", rep.value), ("candidates", rep.candidates)]
    table += [(f"item {i}", f"{inst.actions[a] if a is not None else 'opt-out'} q={format_rational(q)}")
              for i, (a, q) in enumerate(rep.solution.items)]
    _emit(args, doc, table)
    return EXIT_OK


def cmd_solve_rand(args) -> int:
    inst = _instance(args)
    menu, value = solve_randomized(inst)
    _emit(args, rand_to_dict(inst, menu, value), [("value", value)])
    return EXIT_OK


def _vectors(text: str) -> list[list[Fraction]]:
    try:
        return [[as_fraction(v) for v in part.split(",")] for part in text.split(";")]
    except (TypeError, ValueError):
        raise UsageError(f"bad vector list {text!r}") from None


def cmd_solve_cont(args) -> int:
    if args.family in FAMILIES:
        fam = named_family(args.family)
    else:
        fam = load_family(_read(args.family))
    R = _vectors(args.rewards)
    dist = _vectors(args.type_dist)[0] if args.type_dist else [Fraction(1, len(R))] * len(R)
    res = solve_continuous(fam, args.delta, R, dist, threads=args.threads)
    inst = res.program.instance
    doc = solution_to_dict(inst, res.solution, res.value)
    doc.update(
        family=fam.name,
        delta=format_rational(res.program.delta),
        program_value=format_rational(res.program_value),
        provider_slack=format_rational(res.provider_slack),
        guarantee=format_rational(res.guarantee),
    )
    _emit(args, doc, [
        ("family", fam.name), ("grid size", len(res.program.grid)), ("program value", res.program_value),
        ("value", res.value), ("guarantee", res.guarantee), ("provider slack", res.provider_slack),
    ])
    return EXIT_OK


def _load_pricing(inst, raw: bytes):
    doc = json.loads(raw)
    kind = doc.get("kind")
    if kind == "pricing":
        return solution_from_dict(inst, doc)
    if kind == "deterministic":
        if "pricing" in doc:
            return solution_from_dict(inst, doc["pricing"])
        return menu_to_pricing(inst, load_menu(inst, doc), as_fraction(doc.get("eps", "0")))
    raise FormatError(f"cannot robustify a menu of kind {kind!r}", "kind")


def cmd_robustify(args) -> int:
    inst = _instance(args)
    sol = _load_pricing(inst, _read(args.menu))
    params = RobustnessParams(args.delta, max(args.eps, sol.eps))
    out = robustify(inst, sol, params)
    doc = solution_to_dict(inst, out)
    doc["provider_slack"] = format_rational(params.provider_eps)
    _emit(args, doc, [("items kept", len([a for a, _ in out.items if a is not None])),
                      ("value", evaluate(inst, out)), ("provider slack", params.provider_eps)])
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _instance(args)
    raw = _read(args.menu)
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno}") from None
    kind = doc.get("kind")
    if kind == "randomized":
        rep = verify_randomized(inst, rand_from_dict(inst, doc))
        ok = rep.ok
        out = {"kind": kind, "ok": ok, "value": format_rational(rep.value),
               "provider_ic": format_rational(rep.provider_ic), "user_ic": format_rational(rep.user_ic),
               "user_ir": format_rational(rep.user_ir), "details": rep.details}
        table = [("ok", ok), ("value", rep.value), ("provider IC", rep.provider_ic),
                 ("user IC", rep.user_ic), ("user IR", rep.user_ir)]
    elif kind == "deterministic":
        rep = verify_menu(inst, load_menu(inst, doc))
        ok = rep.ok
        out = {"kind": kind, "ok": ok, "value": format_rational(rep.value), "failures": rep.failures(),
               "selection": rep.selection}
        table = [("ok", ok), ("value", rep.value)] + [("failure", f) for f in rep.failures()]
    elif kind == "pricing":
        sol = solution_from_dict(inst, doc)
        rep = verify_approx(inst, sol)
        allowed = as_fraction(doc.get("provider_slack", doc.get("eps", "0")))
        ok = rep.user_ic == 0 and rep.user_ir == 0 and rep.provider_ic <= allowed
        out = {"kind": kind, "ok": ok, "value": format_rational(evaluate(inst, sol)),
               "provider_ic": format_rational(rep.provider_ic), "user_ic": format_rational(rep.user_ic),
               "user_ir": format_rational(rep.user_ir), "details": rep.details}
        table = [("ok", ok), ("provider IC", rep.provider_ic), ("allowed", allowed)]
    else:
        raise FormatError(f"unknown menu kind {kind!r}", "kind")
    _emit(args, out, table)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_oracle(args) -> int:
    inst = _instance(args)
    res = brute_force_opt_k(inst, args.k, limit=args.limit)
    doc = {
        "k": args.k,
        "value": format_rational(res.value),
        "actions": [inst.actions[a] for a in res.actions],
        "assignment": list(res.assignment),
        "prices": [format_rational(q) for q in res.prices],
        "pairs": res.pairs,
    }
    _emit(args, doc, [("k", args.k), ("value", res.value), ("pairs", res.pairs)])
    return EXIT_OK


def cmd_compare(args) -> int:
    inst = _instance(args)
    top = min(inst.n, inst.ell)
    values = {k: solve_menu_k(inst, k, threads=args.threads).value for k in range(1, top + 1)}
    _, rand = solve_randomized(inst)
    doc = {"opt_k": {str(k): format_rational(v) for k, v in values.items()}, "randomized": format_rational(rand)}
    _emit(args, doc, [(f"OPT_{k}", v) for k, v in values.items()] + [("randomized", rand)])
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "solve-det": cmd_solve_det,
    "solve-rand": cmd_solve_rand,
    "solve-cont": cmd_solve_cont,
    "robustify": cmd_robustify,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"delegate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, FamilyError, json.JSONDecodeError) as exc:
        print(f"delegate: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"delegate: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except NotIncentiveCompatible as exc:
        print(f"delegate: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as exc:
        print(f"delegate: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

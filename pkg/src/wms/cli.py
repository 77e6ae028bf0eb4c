"""Command-line entry point ``wms``.

Exit codes: 0 success, 2 witness not found, 3 input error, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from ._search import DEFAULT_NODE_BUDGET, Budget
from .dividing import DEFAULT_ORBIT_LIMIT, search_k_dividing
from .errors import BudgetExceeded, InputError, InvalidArgument, NoWideExtension
from .families import LADDER_MODES, FamilySpec, generate, ladder_experiment
from .ideals import from_config
from .logic import PartitionedFormula, evaluate, load_structure
from .stability import (
    ROW_MODES,
    count_wide_types,
    rank,
    wide_independence_witness,
    wide_order_witness,
    wide_strict_order_witness,
)

EXIT_OK, EXIT_NOT_FOUND, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3, 4


def split_top_level(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside parentheses."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    parts.append("".join(current).strip())
    return [p for p in parts if p]


def _int_list(text: str) -> list[int]:
    text = text.strip().strip("()[]")
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InvalidArgument(f"not a list of integers: {text!r}") from exc


def _int_range(text: str) -> range:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return range(int(lo), int(hi) + 1)
        return range(int(text), int(text) + 1)
    except ValueError as exc:
        raise InvalidArgument(f"not a range A..B: {text!r}") from exc


def _load_ideal(path: str, structure, context: str):
    try:
        with open(path) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidArgument(f"{path}: {exc}") from exc
    return from_config(config, structure, context)


def _emit(data) -> None:
    sys.stdout.write(json.dumps(data, sort_keys=True) + "\n")


def _budget(args) -> Budget:
    return Budget(args.budget)


def cmd_eval(args) -> int:
    S = load_structure(args.structure)
    D = evaluate(S, args.formula, args.context)
    variables = [v.strip() for v in args.context.split(",")]
    if args.out == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(variables)
        writer.writerows(D.tuples())
    else:
        _emit({"context": variables, "size": D.size, "tuples": [list(t) for t in D.tuples()]})
    return EXIT_OK


def cmd_rank(args) -> int:
    S = load_structure(args.structure)
    I = _load_ideal(args.ideal, S, args.context)
    phi = PartitionedFormula.parse(args.phi, S.signature, x=args.context)
    psi = evaluate(S, args.psi, args.context)
    result = rank(S, I, psi, phi, args.max, workers=args.workers, budget=_budget(args), psi_label=args.psi)
    _emit(result.to_json())
    return EXIT_OK


def cmd_order(args) -> int:
    S = load_structure(args.structure)
    I = _load_ideal(args.ideal, S, args.context)
    phi = PartitionedFormula.parse(args.phi, S.signature, x=args.context)
    common = dict(distinct=args.distinct, workers=args.workers, budget=_budget(args))
    if args.command == "order":
        found = wide_order_witness(S, I, phi, args.len, row_mode=args.row_mode, **common)
        payload = found.to_json() if found else None
    elif args.command == "wip":
        found = wide_independence_witness(S, I, phi, args.len, **common)
        payload = {"b": [list(c) for c in found], "phi": str(phi)} if found else None
    else:
        found = wide_strict_order_witness(S, I, phi, args.len, **common)
        payload = {"b": [list(c) for c in found], "phi": str(phi)} if found else None
    _emit({"found": payload is not None, "witness": payload})
    return EXIT_OK if payload is not None else EXIT_NOT_FOUND


def cmd_types(args) -> int:
    S = load_structure(args.structure)
    I = _load_ideal(args.ideal, S, args.context)
    base = list(range(S.m)) if args.params == "all" else _int_list(args.params)
    if args.delta is None:
        counts = count_wide_types(S, I, None, base, k=len(args.context.split(",")))
    else:
        delta = [PartitionedFormula.parse(t, S.signature, x=args.context) for t in split_top_level(args.delta)]
        counts = count_wide_types(S, I, delta, base)
    _emit(counts.to_json())
    return EXIT_OK


def cmd_divide(args) -> int:
    S = load_structure(args.structure)
    I = _load_ideal(args.ideal, S, args.context)
    psi = PartitionedFormula.parse(args.psi, S.signature, x=args.context)
    found = search_k_dividing(
        S,
        I,
        psi,
        _int_list(args.c),
        _int_list(args.base),
        args.k,
        args.len,
        distinct=args.distinct,
        orbit_limit=args.orbit_limit,
        workers=args.workers,
        budget=_budget(args),
    )
    _emit({"found": found is not None, "witness": found.to_json() if found else None})
    return EXIT_OK if found else EXIT_NOT_FOUND


def cmd_family_ladder(args) -> int:
    report = ladder_experiment(_int_range(args.n), args.N, args.mode)
    if args.report:
        report.write_csv(args.report)
    _emit(report.to_json())
    return EXIT_OK


def cmd_family_generate(args) -> int:
    params = {}
    for item in args.param:
        name, _, value = item.partition("=")
        try:
            params[name] = int(value)
        except ValueError as exc:
            raise InvalidArgument(f"family parameters are integers: {item!r}") from exc
    fam = generate(FamilySpec.of(args.kind, **params))
    if fam.structure is None:
        raise InvalidArgument(f"{fam.spec} is too large to write out explicitly")
    data = fam.structure.to_json()
    data["parts"] = {name: [r.start, r.stop] for name, r in fam.parts.items()}
    text = json.dumps(data, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wms", description="Wide-type model checking on finite structures.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, ideal=True):
        p.add_argument("--structure", required=True, help="structure JSON file")
        if ideal:
            p.add_argument("--ideal", required=True, help="ideal JSON config")
        p.add_argument("--context", default="x", help="object variables, comma separated")

    def search(p):
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET, help="search node budget")

    p = sub.add_parser("eval", help="evaluate a formula")
    common(p, ideal=False)
    p.add_argument("--formula", required=True)
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rank", help="capped wide 2-rank")
    common(p)
    search(p)
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", default="true")
    p.add_argument("--max", type=int, required=True)
    p.set_defaults(func=cmd_rank)

    for name, text in (("order", "wide order property"), ("wip", "wide independence"), ("wsop", "wide strict order")):
        p = sub.add_parser(name, help=f"search for a {text} witness")
        common(p)
        search(p)
        p.add_argument("--phi", required=True)
        p.add_argument("--len", type=int, required=True)
        p.add_argument("--distinct", action="store_true", help="require distinct parameter tuples")
        if name == "order":
            p.add_argument("--row-mode", choices=ROW_MODES, default="listed")
        p.set_defaults(func=cmd_order)

    p = sub.add_parser("types", help="count wide types over a parameter set")
    common(p)
    p.add_argument("--delta", help="formulas separated by top-level commas; omit for the full language")
    p.add_argument("--params", default="all", help="'all' or a comma-separated element list")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("divide", help="search for a k-dividing witness")
    common(p)
    search(p)
    p.add_argument("--psi", required=True)
    p.add_argument("--c", required=True, help="parameter tuple, e.g. 0 or 0,1")
    p.add_argument("--base", default="", help="base set, comma separated")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--len", type=int, required=True, help="witness sequence length")
    p.add_argument("--distinct", action="store_true")
    p.add_argument("--orbit-limit", type=int, default=DEFAULT_ORBIT_LIMIT)
    p.set_defaults(func=cmd_divide)

    p = sub.add_parser("family", help="structure families")
    fam = p.add_subparsers(dest="family_command", required=True)
    q = fam.add_parser("ladder", help="ladder-clique ratio experiment")
    q.add_argument("--n", required=True, help="range A..B")
    q.add_argument("--N", type=int, default=4)
    q.add_argument("--mode", choices=LADDER_MODES, default="implicit")
    q.add_argument("--report", help="CSV output path")
    q.set_defaults(func=cmd_family_ladder)
    q = fam.add_parser("generate", help="write a family member as a structure file")
    q.add_argument("kind")
    q.add_argument("--param", action="append", default=[], help="name=value, repeatable")
    q.add_argument("--out")
    q.set_defaults(func=cmd_family_generate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"wms: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except NoWideExtension as exc:
        print(f"wms: {exc}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except InputError as exc:
        print(f"wms: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"wms: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

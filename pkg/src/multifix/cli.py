"""Command-line surface tying the modules together.

Subcommands: solve, oracle, classify, estimate-k, closure, conditions.
Every produced verdict exits 0, including negative ones; only errors
(malformed files, guard violations) exit nonzero.  Reports are printed
as JSON (sorted keys, so identical inputs give byte-identical output) or
as indented key/value text.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .contraction import BoxPairSampler, ExhaustivePairSampler, estimate_k_sum, estimate_k_sup
from .errors import MultifixError
from .lifting import coupled_family, cyclic_family, family_conditions, family_from_dict, tripled_family
from .oracle import FiniteInstance, cross_validate
from .problems import resolve_problem, with_overrides
from .product import check_closure
from .solver import solve
from .spaces import FiniteDistanceSpace, classify_finite

TOL_ENV_VAR = "MULTIFIX_TOL"


def _emit(report_dict: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report_dict, sort_keys=True))
    else:
        _emit_text(report_dict)


def _emit_text(value, indent: int = 0, label: str | None = None) -> None:
    pad = "  " * indent
    head = f"{pad}{label}: " if label is not None else pad
    if isinstance(value, dict):
        if label is not None:
            print(f"{pad}{label}:")
        for k in sorted(value):
            _emit_text(value[k], indent + (label is not None), str(k))
    elif isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            print(f"{head}{value}")
        else:
            if label is not None:
                print(f"{pad}{label}:")
            for v in value:
                _emit_text(v, indent + 1, "-")
    else:
        print(f"{head}{value}")


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _default_tol() -> float | None:
    raw = os.environ.get(TOL_ENV_VAR)
    return float(raw) if raw else None


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="text")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None, help=f"overrides ${TOL_ENV_VAR}")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--window", type=int, default=None)


def _parse_box(raw: str) -> tuple:
    parts = raw.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("box must look like lo:hi")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise argparse.ArgumentTypeError("box needs lo < hi")
    return lo, hi


def _cmd_solve(args) -> int:
    problem = resolve_problem(args.problem)
    problem = with_overrides(
        problem,
        tol=args.tol if args.tol is not None else _default_tol(),
        max_iter=args.max_iter,
        window=args.window,
    )
    start = problem.start
    if args.start:
        vals = [float(v) for v in args.start.split(",")]
        if isinstance(problem.space, FiniteDistanceSpace):
            vals = [int(v) for v in vals]
        start = tuple(vals)
    report = solve(problem.operator, problem.family, start, problem.space, problem.config)
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            for record in report.trace.export_records():
                fh.write(json.dumps(record, sort_keys=True) + "\n")
    _emit(report.to_dict(), args.format)
    return 0


def _cmd_oracle(args) -> int:
    if args.instance:
        inst = FiniteInstance.from_dict(_load_json(args.instance), label=args.instance)
    else:
        problem = resolve_problem(args.problem)
        if not isinstance(problem.space, FiniteDistanceSpace):
            raise MultifixError("oracle runs need a finite-space problem or an instance file")
        table = [problem.operator(t) for t in _all_tuples(problem.space.n, problem.family.m)]
        inst = FiniteInstance(
            space=problem.space,
            f_table=tuple(table),
            family=problem.family,
            label=problem.key,
        )
    report = cross_validate(inst)
    _emit(report.to_dict(), args.format)
    return 0


def _all_tuples(n: int, m: int):
    from itertools import product

    return product(range(n), repeat=m)


def _cmd_classify(args) -> int:
    space = FiniteDistanceSpace.from_dict(_load_json(args.space))
    _emit(classify_finite(space).to_dict(), args.format)
    return 0


def _cmd_estimate_k(args) -> int:
    problem = resolve_problem(args.problem)
    if isinstance(problem.space, FiniteDistanceSpace):
        sampler = ExhaustivePairSampler(problem.space.n, problem.family.m)
        count = None
    else:
        box = args.box if args.box else problem.box
        seed = args.seed if args.seed is not None else problem.seed
        sampler = BoxPairSampler(box, problem.family.m, seed=seed)
        count = args.count
    estimate = estimate_k_sup if args.mode == "sup" else estimate_k_sum
    report = estimate(problem.operator, problem.space, sampler, count)
    _emit(report.to_dict(), args.format)
    return 0


def _cmd_closure(args) -> int:
    space = FiniteDistanceSpace.from_dict(_load_json(args.space))
    _emit(check_closure(space, args.m).to_dict(), args.format)
    return 0


def _cmd_conditions(args) -> int:
    if args.family:
        family = family_from_dict(_load_json(args.family))
    elif args.builtin == "coupled":
        family = coupled_family()
    elif args.builtin == "tripled":
        family = tripled_family()
    else:
        family = cyclic_family(args.N)
    _emit(family_conditions(family).to_dict(), args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multifix",
        description="Multi-slot fixed-point solving, classification, and oracles "
        "on generalized distance spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="iterate a problem and report the certified outcome")
    p.add_argument("--problem", required=True, help="builtin key (P1..P6) or problem file")
    p.add_argument("--start", default=None, help="comma-separated start tuple")
    p.add_argument("--trace-out", default=None, help="write the orbit as JSON lines")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive cross-validation on a finite instance")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="instance file (space + F_table + lambda)")
    src.add_argument("--problem", help="builtin key with a finite space (P5, P6)")
    _add_common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("classify", help="decide every distance-class flag of a finite space")
    p.add_argument("--space", required=True, help="JSON file with n and matrix")
    _add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("estimate-k", help="contraction-constant estimate for a problem")
    p.add_argument("--problem", required=True)
    p.add_argument("--mode", choices=("sup", "sum"), default="sup")
    p.add_argument("--count", type=int, default=4096)
    p.add_argument("--box", type=_parse_box, default=None, help="sampling box lo:hi")
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_estimate_k)

    p = sub.add_parser("closure", help="compare a finite base against its two products")
    p.add_argument("--space", required=True, help="JSON file with n and matrix")
    p.add_argument("-m", type=int, default=2, help="product arity")
    _add_common(p)
    p.set_defaults(func=_cmd_closure)

    p = sub.add_parser("conditions", help="structural predicates of an index family")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", choices=("coupled", "tripled", "cyclic"))
    src.add_argument("--family", help="JSON family file")
    p.add_argument("--N", type=int, default=3, help="order for the cyclic builtin")
    _add_common(p)
    p.set_defaults(func=_cmd_conditions)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MultifixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

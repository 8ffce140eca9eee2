"""Command-line interface.

Subcommands: `elliptic` runs the full pipeline for one (a, b); `cohomology`
computes resolving-complex cohomology of a serialized diagram functor;
`hull` runs the obstruction calculus from a serialized configuration;
`selftest` runs the property suite. Exit codes: 0 success, 1 domain errors
(singular curve, failed stabilization, malformed inputs), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from .cokernels import NoStabilization
from .report import Report


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncdef",
        description="Exact noncommutative deformation calculus on finite covers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elliptic", help="full pipeline for the plane-cubic charts")
    p.add_argument("--a", type=_rational, required=True, help="rational, e.g. 1 or 3/2")
    p.add_argument("--b", type=_rational, required=True)
    p.add_argument("--hull-order", type=int, default=4)
    p.add_argument("--dmax", type=int, default=24)
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--full-complex", action="store_true",
                   help="report degree-1 classes with explicit identity slots")
    p.add_argument("--out", default=None, help="write the report to this path")

    p = sub.add_parser("cohomology", help="cohomology of a serialized diagram")
    p.add_argument("diagram", help="diagram JSON (schema ncdef-diagram/1)")
    p.add_argument("--p-max", type=int, default=2)
    p.add_argument("--full-complex", action="store_true",
                   help="use the non-normalized complex")
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--out", default=None)

    p = sub.add_parser("hull", help="hull computation from a config file")
    p.add_argument("config", help="configuration JSON (schema ncdef-hull/1)")
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--out", default=None)

    p = sub.add_parser("selftest", help="run the property suite")
    return parser


def _emit(report: Report, fmt: str, out) -> None:
    text = report.render(fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.elapsed is not None:
        print(f"ncdef: done in {report.elapsed:.2f} s", file=sys.stderr)


def _cmd_elliptic(args) -> int:
    from . import elliptic

    cfg = elliptic.build(args.a, args.b)
    report = elliptic.run_full_pipeline(
        cfg, hull_order=args.hull_order, d_max=args.dmax,
        full_complex=args.full_complex,
    )
    _emit(report, args.format, args.out)
    return 0


def _cmd_cohomology(args) -> int:
    from .diagram_io import load_functor
    from .diagrams import build_resolving_complex

    t0 = time.perf_counter()
    base, functor = load_functor(args.diagram)
    rc = build_resolving_complex(
        base, functor, normalized=not args.full_complex, p_max=args.p_max
    )
    run = {}
    for p in range(args.p_max):
        h = rc.cohomology(p)
        reps = []
        for vec in h.representatives:
            slots = {}
            for t, labels, off in rc.slot_layout(p):
                coords = vec[off: off + len(labels)]
                if any(c != 0 for c in coords):
                    slots["|".join(t)] = {
                        lbl: str(c) for lbl, c in zip(labels, coords) if c
                    }
            reps.append(slots)
        run[str(p)] = {"dim": h.dim, "representatives": reps}
    payload = {
        "schema": "ncdef/1",
        "diagram": args.diagram,
        "normalized": not args.full_complex,
        "cohomology_run": run,
    }
    _emit(Report(payload, elapsed=time.perf_counter() - t0), args.format, args.out)
    return 0


def _cmd_hull(args) -> int:
    from . import elliptic

    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    if config.get("schema") != "ncdef-hull/1":
        raise ValueError(f"expected schema 'ncdef-hull/1', got {config.get('schema')!r}")
    if config.get("kind") != "elliptic":
        raise ValueError(f"unsupported configuration kind {config.get('kind')!r}")
    t0 = time.perf_counter()
    cfg = elliptic.build(Fraction(config["a"]), Fraction(config["b"]))
    ctx = elliptic.build_context(cfg, d_max=int(config.get("dmax", 24)))
    result = ctx.hull_compute(int(config.get("hull_order", 4)))
    payload = {
        "schema": "ncdef/1",
        "input": {
            "a": str(cfg.a), "b": str(cfg.b),
            "hull_order": result.order,
            "dmax": int(config.get("dmax", 24)),
        },
        "discriminant": str(cfg.discriminant),
        "regime": cfg.regime,
        "hull": {
            "relations": result.relation_strings(),
            "new_relations_by_order": {
                str(k): v for k, v in sorted(result.new_relations_by_order.items())
            },
            "dims_by_radical_degree": result.hull.radical_dims_by_order(),
            "dim": result.hull.dim,
        },
        "verdicts": {
            "hull_versal_zero_defect": ctx.validate(result.versal_datum).is_zero()
        },
    }
    _emit(Report(payload, elapsed=time.perf_counter() - t0), args.format, args.out)
    return 0


def _cmd_selftest(_args) -> int:
    from .selftest import run_all

    return 0 if run_all() else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    handlers = {
        "elliptic": _cmd_elliptic,
        "cohomology": _cmd_cohomology,
        "hull": _cmd_hull,
        "selftest": _cmd_selftest,
    }
    from .elliptic import SingularCurve
    from .engine import EngineError

    try:
        return handlers[args.command](args)
    except (SingularCurve, NoStabilization, EngineError,
            ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"ncdef: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

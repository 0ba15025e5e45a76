"""Command line front end.

Exit codes: 0 when every check passes, 1 when a theorem or oracle check is
falsified, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from finitary import algebra as alg
from finitary.core import (
    FinitaryPoset,
    ObservationTable,
    OrderError,
    TableError,
    finitary_substitute,
)
from finitary.covering import (
    SAMPLER_ALGORITHM,
    CoveringError,
    CoveringSpec,
    Grid,
    Uniform,
    fixture,
    nerve_empirical,
    nerve_exact,
    nerve_to_dict,
    sample_events,
    spec_from_dict,
    tabulate_counted,
)
from finitary.generators import random_tables
from finitary.oracle import DEFAULT_DIMENSION_BOUND, DimensionBoundExceeded, ideal_product_oracle
from finitary.tableio import (
    complex_to_dot,
    dumps,
    poset_to_dict,
    poset_to_dot,
    poset_to_text,
    read_table,
    table_to_dict,
    table_to_text,
)

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


INPUT_ERRORS = (UsageError, TableError, OrderError, CoveringError, alg.AlgebraError, OSError, json.JSONDecodeError)


# -- input resolution --------------------------------------------------------


def _load_spec(args) -> CoveringSpec | None:
    if getattr(args, "fixture", None):
        return fixture(args.fixture)
    if getattr(args, "spec", None):
        return spec_from_dict(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    return None


def _sampling(args):
    if getattr(args, "uniform", None) is not None:
        return Uniform(args.uniform, args.seed)
    return Grid(args.grid if args.grid is not None else 4)


def _check_sampling(args) -> None:
    for flag in ("grid", "uniform"):
        value = getattr(args, flag, None)
        if value is not None and value < 1:
            raise UsageError(f"--{flag} must be at least 1")


def _table(args) -> tuple[ObservationTable, list[str]]:
    if getattr(args, "table", None):
        return read_table(args.table), []
    spec = _load_spec(args)
    if spec is None:
        raise UsageError("give one of --table, --fixture or --spec")
    _check_sampling(args)
    return tabulate_counted(spec, sample_events(spec, _sampling(args)))


def _poset(args) -> FinitaryPoset:
    return finitary_substitute(_table(args)[0])


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- commands ----------------------------------------------------------------


def cmd_simulate(args) -> int:
    if _load_spec(args) is None:
        raise UsageError("simulate needs --fixture or --spec")
    table, dropped = _table(args)
    print(f"dropped events: {len(dropped)}", file=sys.stderr)
    if args.output:
        out = Path(args.output)
        out.write_text(dumps(table_to_dict(table)), encoding="utf-8")
        out.with_suffix(".txt").write_text(table_to_text(table), encoding="utf-8")
    elif args.format == "text":
        sys.stdout.write(table_to_text(table))
    else:
        sys.stdout.write(dumps(table_to_dict(table)))
    return EXIT_OK


def cmd_substitute(args) -> int:
    poset = _poset(args)
    if args.format == "dot":
        _emit(args, poset_to_dot(poset))
    elif args.format == "text":
        _emit(args, poset_to_text(poset))
    else:
        _emit(args, dumps(poset_to_dict(poset)))
    return EXIT_OK


def cmd_algebra(args) -> int:
    poset = _poset(args)
    basis = alg.AlgebraBasis(poset)
    spectrum = alg.primitive_spectrum(basis)
    doc = {
        "dimension": basis.dimension,
        "points": len(poset),
        "spectrum": [
            {"point": s, "dimension": x.dimension, "codimension": x.codimension}
            for s, x in zip(poset.labels, spectrum)
        ],
    }
    if args.multiply:
        a, b = (alg.parse_element(basis, lit) for lit in args.multiply)
        doc["product"] = alg.format_element(alg.multiply(a, b))
    if args.format == "text":
        lines = [f"dimension: {basis.dimension}", f"spectrum: {len(spectrum)} primitive ideals"]
        lines += [f"  X[{d['point']}]: dim {d['dimension']}, codim {d['codimension']}" for d in doc["spectrum"]]
        if "product" in doc:
            lines.append(f"product: {doc['product']}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(doc))
    return EXIT_OK


def cmd_rota(args) -> int:
    poset = _poset(args)
    basis = alg.AlgebraBasis(poset)
    witnesses = alg.rota_witnesses(basis)
    rho = frozenset(witnesses)
    agrees = rho == alg.rota_relation_fast(poset)
    doc = {
        "rho": sorted([list(p) for p in rho]),
        "witnesses": {f"{r} {s}": sorted(f"|{p}><{q}|" for p, q in w) for (r, s), w in sorted(witnesses.items())},
        "matches_covering": agrees,
    }
    if args.format == "text":
        lines = [f"{r} rho {s}   missing {', '.join(doc['witnesses'][f'{r} {s}'])}" for r, s in sorted(rho)]
        lines.append(f"matches covering relation: {agrees}")
        _emit(args, "\n".join(lines) + "\n")
    elif args.format == "dot":
        _emit(args, poset_to_dot(poset, name="rota"))
    else:
        _emit(args, dumps(doc))
    return EXIT_OK if agrees else EXIT_FALSIFIED


def check_instance(poset: FinitaryPoset, oracle: bool, dimension_bound: int) -> dict:
    """Theorem, relation dual-path and (optionally) oracle checks for one poset."""
    basis = alg.AlgebraBasis(poset)
    report = alg.verify_theorem(poset, basis)
    out = report.to_dict()
    out["points"] = len(poset)
    out["rota_equals_covering"] = report.rho == alg.rota_relation_fast(poset)
    ok = report.theorem_holds and out["rota_equals_covering"]
    if oracle:
        try:
            pairs = list(alg.iter_spectrum_pairs(basis))
            mismatches = [
                [r, s]
                for r, s, xr, xs in pairs
                if alg.ideal_product(xr, xs) != ideal_product_oracle(xr, xs, dimension_bound=dimension_bound)
            ]
            out["oracle"] = {"checked": len(pairs), "mismatches": mismatches}
            ok = ok and not mismatches
        except DimensionBoundExceeded as exc:
            out["oracle"] = {"skipped": str(exc)}
    out["ok"] = ok
    return out


def _check_table(job: tuple[ObservationTable, bool, int]) -> dict:
    table, oracle, bound = job
    return check_instance(finitary_substitute(table), oracle, bound)


def cmd_verify(args) -> int:
    if args.dim_bound < 1:
        raise UsageError("--dim-bound must be at least 1")
    if args.random is not None:
        if args.random < 1 or args.max_events < 1 or args.max_observers < 1:
            raise UsageError("--random, --max-events and --max-observers must be positive")
        tables = random_tables(args.random, args.max_events, args.max_observers, args.seed)
    else:
        tables = [_table(args)[0]]
    jobs = [(t, args.oracle, args.dim_bound) for t in tables]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_check_table, jobs, chunksize=16))
    else:
        results = [_check_table(j) for j in jobs]
    for k, res in enumerate(results):
        res["index"] = k
    held = sum(r["theorem_holds"] for r in results)
    ok = sum(r["ok"] for r in results)
    skipped = sum("skipped" in r.get("oracle", {}) for r in results)
    summary = {"instances": len(results), "theorem_holds": held, "all_checks_pass": ok, "oracle_skipped": skipped}
    if args.random is not None:
        summary.update(
            seed=args.seed,
            max_events=args.max_events,
            max_observers=args.max_observers,
            generator=f"{SAMPLER_ALGORITHM}, per-instance seed 'finitary:<seed>:<index>'",
        )
    if args.format == "text":
        lines = []
        for r in results:
            line = (
                f"[{r['index']}] points={r['points']} rota_opens={r['open_counts']['rota']} "
                f"sorkin_opens={r['open_counts']['sorkin']} theorem_holds={r['theorem_holds']}"
            )
            if "oracle" in r:
                o = r["oracle"]
                line += " oracle=skipped" if "skipped" in o else f" oracle_mismatches={len(o['mismatches'])}/{o['checked']}"
            lines.append(line)
        lines.append(f"{ok}/{len(results)} instances pass; theorem holds on {held}/{len(results)}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps({"summary": summary, "reports": results}))
    return EXIT_OK if ok == len(results) else EXIT_FALSIFIED


def cmd_nerve(args) -> int:
    mode = args.mode
    spec = None
    if args.table:
        if mode == "exact":
            raise UsageError("exact nerves need a geometric covering (--fixture or --spec), not a table")
        cx = nerve_empirical(read_table(args.table))
    else:
        spec = _load_spec(args)
        if spec is None:
            raise UsageError("give one of --table, --fixture or --spec")
        if mode == "empirical":
            cx = nerve_empirical(_table(args)[0])
        else:
            cx = nerve_exact(spec)
    doc = nerve_to_dict(cx, spec)
    if spec is not None:
        print(f"nerve dimension {cx.dimension}, space dimension {spec.space.dim}", file=sys.stderr)
        if cx.dimension > spec.space.dim:
            print("warning: nerve dimension exceeds space dimension (realisation artifact)", file=sys.stderr)
    if args.format == "dot":
        _emit(args, complex_to_dot(cx))
    elif args.format == "text":
        lines = ["maximal faces:"]
        lines += ["  {" + ", ".join(f) + "}" for f in doc["maximal_faces"]]
        lines.append(f"dimension: {cx.dimension}")
        if spec is not None:
            lines.append(f"space dimension: {spec.space.dim}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(doc))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    if args.what == "nerve":
        args.format = "dot"
        return cmd_nerve(args)
    _emit(args, poset_to_dot(_poset(args)))
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _global_flags(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--format", choices=["json", "dot", "text"], default=default("json"))
    parser.add_argument("--seed", type=int, default=default(1), help="seed for random suites and uniform sampling")
    parser.add_argument("--output", "-o", default=default(None), help="write to this file instead of stdout")


def _input_flags(parser: argparse.ArgumentParser, table: bool = True) -> None:
    src = parser.add_mutually_exclusive_group()
    if table:
        src.add_argument("--table", help="observation table (JSON or +/- grid)")
    src.add_argument("--fixture", help="built-in covering: paper-circle or paper-interval")
    src.add_argument("--spec", help="covering spec JSON file")
    samp = parser.add_mutually_exclusive_group()
    samp.add_argument("--grid", type=int, help="equally spaced events (default 4)")
    samp.add_argument("--uniform", type=int, help=f"seeded random events ({SAMPLER_ALGORITHM})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finitary", description="Finitary substitutes and their incidence algebras.")
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="tabulate events sampled from a covering")
    _input_flags(p, table=False)
    _global_flags(p, suppress=True)
    p.set_defaults(func=cmd_simulate)

    for name, func, text in [
        ("substitute", cmd_substitute, "finitary substitute of a table"),
        ("algebra", cmd_algebra, "incidence algebra dimension and primitive spectrum"),
        ("rota", cmd_rota, "Rota relation by ideal arithmetic"),
    ]:
        p = sub.add_parser(name, help=text)
        _input_flags(p)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        if name == "algebra":
            p.add_argument("--multiply", nargs=2, metavar=("A", "B"), help="multiply two element literals")

    p = sub.add_parser("verify", help="check that the Rota and Sorkin topologies coincide")
    _input_flags(p)
    _global_flags(p, suppress=True)
    p.add_argument("--random", type=int, help="run a suite of N random tables instead")
    p.add_argument("--max-events", type=int, default=10)
    p.add_argument("--max-observers", type=int, default=6)
    p.add_argument("--oracle", action="store_true", help="also check ideal products by linear algebra")
    p.add_argument("--dim-bound", type=int, default=DEFAULT_DIMENSION_BOUND)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("nerve", help="nerve of a covering (exact) or of a table (empirical)")
    _input_flags(p)
    _global_flags(p, suppress=True)
    p.add_argument("--mode", choices=["exact", "empirical"])
    p.set_defaults(func=cmd_nerve)

    p = sub.add_parser("export-dot", help="DOT of the Hasse diagram or the nerve 1-skeleton")
    _input_flags(p)
    _global_flags(p, suppress=True)
    p.add_argument("--what", choices=["poset", "nerve"], default="poset")
    p.add_argument("--mode", choices=["exact", "empirical"])
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"finitary {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

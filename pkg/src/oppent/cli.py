"""Command-line entry point.

Exit codes: 0 success (unreachable demands included), 1 usage error,
2 scenario validation error, 3 internal invariant violation.

When ``OPPENT_OUTPUT_DIR`` is set, a relative ``--output`` path is resolved
against it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .engine import complexity_probe
from .network import NetworkError, generate_network
from .scenario import (
    SWEEP_PARAMETERS,
    ScenarioError,
    csv_text,
    parse_scenario,
    report_csv,
    report_json,
    run,
    sweep,
    sweep_csv,
)

OUTPUT_DIR_ENV = "OPPENT_OUTPUT_DIR"

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="oppent", description="Opportunistic entanglement distribution simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, default_format):
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--format", choices=("report", "csv"), default=default_format)

    p = sub.add_parser("run", help="run every demand of a scenario")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, help="override the scenario master seed")
    p.add_argument("--greedy", action="store_true", help="use the hop-by-hop greedy walk")
    common(p, "report")

    p = sub.add_parser("sweep", help="rerun a scenario over values of one parameter")
    p.add_argument("scenario")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    p.add_argument("--values", required=True, type=_float_list)
    p.add_argument("--seed", type=int)
    p.add_argument("--greedy", action="store_true")
    common(p, "csv")

    p = sub.add_parser("generate", help="emit a generated network section")
    p.add_argument("--kind", required=True, choices=("line", "grid", "random_geometric"))
    p.add_argument("--n", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--upgrade-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    common(p, "report")

    p = sub.add_parser("probe-complexity", help="count search operations per network size")
    p.add_argument("--sizes", required=True, type=_int_list)
    p.add_argument("--kind", choices=("line", "grid", "random_geometric"), default="line")
    p.add_argument("--seed", type=int, default=0)
    common(p, "csv")
    return parser


def _load(path, seed):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read scenario: {exc}") from None
    scenario = parse_scenario(text)
    if seed is not None:
        scenario.seed = seed
    return scenario


def _emit(text, output):
    if not text.endswith("\n"):
        text += "\n"
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _dispatch(args):
    if args.command == "run":
        report = run(_load(args.scenario, args.seed), greedy=args.greedy)
        return report_csv(report) if args.format == "csv" else report_json(report)

    if args.command == "sweep":
        rows = sweep(_load(args.scenario, args.seed), args.param, args.values, greedy=args.greedy)
        if args.format == "csv":
            return sweep_csv(rows)
        keys = ("value", "demand", "source_cost", "path_usability", "unreachable")
        return json.dumps({"parameter": args.param, "rows": [dict(zip(keys, r)) for r in rows]}, indent=2) + "\n"

    if args.command == "generate":
        params = {k: getattr(args, k) for k in ("n", "rows", "cols", "radius") if getattr(args, k) is not None}
        try:
            net = generate_network(args.kind, args.seed, upgrade_prob=args.upgrade_prob, **params)
        except NetworkError as exc:
            raise UsageError(str(exc)) from None
        doc = {"nodes": net.node_count, "edges": [list(t) for t in net.edge_triples()]}
        if args.format == "csv":
            return csv_text(net.edge_triples(), ("u", "v", "level"))
        return json.dumps(doc) + "\n"

    if args.command == "probe-complexity":
        try:
            rows = complexity_probe(args.sizes, kind=args.kind, seed=args.seed)
        except NetworkError as exc:
            raise UsageError(str(exc)) from None
        fields = ("kind", "nodes", "edges", "extractions", "comparisons", "ratio")
        table = [(r.kind, r.nodes, r.edges, r.extractions, r.comparisons, float(f"{r.ratio:.12g}")) for r in rows]
        if args.format == "csv":
            return csv_text(table, fields)
        return json.dumps([dict(zip(fields, r)) for r in table], indent=2) + "\n"

    raise UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _emit(_dispatch(args), args.output)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""``gridrisk`` command line.

Exit status: 0 success, 1 the catalog or plan has error-severity findings
(or does not parse), 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from gridrisk import report
from gridrisk.catalog import (
    Catalog,
    DreadScore,
    Severity,
    check_score,
    loads_catalog,
    parse_catalog,
    parse_number,
    validate_catalog,
)
from gridrisk.errors import GraphError, GridRiskError, ParseError, UnknownMitigation, ValidationError
from gridrisk.interdependency import propagate_failure
from gridrisk.mitigation import (
    classify_5r,
    load_plan,
    prioritize_mitigations,
    residual_as_register,
    residual_register,
)
from gridrisk.register import assemble_register, diff_registers
from gridrisk.scoring import (
    dread_overall,
    integerize_triple,
    map_dread_to_triple,
    physical_risk_score,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2

SAMPLE_PREFIX = "@"


class UsageError(Exception):
    pass


def sample_path(name: str) -> Path:
    """Filesystem path of a catalog shipped with the package."""
    path = Path(str(resources.files("gridrisk") / "samples" / f"{name}.json"))
    if not path.is_file():
        raise UsageError(f"no shipped sample named {name!r}")
    return path


def _resolve(arg: str) -> Path:
    if arg.startswith(SAMPLE_PREFIX):
        return sample_path(arg[len(SAMPLE_PREFIX):])
    return Path(arg)


def _read(arg: str) -> bytes:
    try:
        return _resolve(arg).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {arg}: {exc.strerror or exc}") from None


def _load(arg: str) -> Catalog:
    return loads_catalog(_read(arg))


def _use_color(stream) -> bool:
    return "GRIDRISK_NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _write(out: Path | None, name: str, data: bytes) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_bytes(data)


def _fmt_triple(t) -> str:
    return "(" + ", ".join(report.format_number(c) for c in t.as_tuple()) + ")"


def cmd_validate(args: argparse.Namespace) -> int:
    catalog = parse_catalog(_read(args.catalog))
    findings = validate_catalog(catalog)
    color = _use_color(sys.stdout)
    for f in findings:
        line = str(f)
        if color:
            code = "31" if f.severity is Severity.ERROR else "33"
            line = f"\x1b[{code}m{line}\x1b[0m"
        print(line)
    errors = sum(f.severity is Severity.ERROR for f in findings)
    if not args.quiet:
        print(
            f"{len(catalog.threats)} threats, {len(catalog.vulnerabilities)} vulnerabilities, "
            f"{len(catalog.pairs)} pairs, {len(catalog.cyber_entries)} cyber entries, "
            f"{len(catalog.mitigations)} mitigations; {errors} errors, {len(findings) - errors} warnings",
            file=sys.stderr,
        )
    return EXIT_FINDINGS if errors else EXIT_OK


def cmd_assess(args: argparse.Namespace) -> int:
    catalog = _load(args.catalog)
    register = assemble_register(catalog, include_scenarios=args.include_interdependency)
    out = Path(args.out) if args.out else None
    if args.format == "csv":
        _write(out, "register.csv", report.emit_register_csv(register))
    elif args.format == "doc":
        _write(out, "register.json", report.dumps_register_doc(register))
        if out is not None:
            radar, bars = report.dumps_plot_data(
                report.emit_radar_data(catalog.cyber_entries), report.emit_bar_data(register)
            )
            _write(out, "radar.json", radar)
            _write(out, "bars.json", bars)
    else:
        priorities = prioritize_mitigations(register, catalog) if catalog.mitigations else None
        text = report.emit_summary_markdown(register, priorities=priorities, five_r=classify_5r(catalog))
        _write(out, "summary.md", text.encode("utf-8"))
    if out is not None and not args.quiet:
        print(f"{len(register)} entries written to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_dread(args: argparse.Namespace) -> int:
    if args.catalog:
        if args.scores or not args.entry:
            raise UsageError("use either five scores or --catalog with --entry")
        catalog = _load(args.catalog)
        try:
            dread = catalog.cyber_entry(args.entry).dread
        except KeyError:
            raise UsageError(f"no cyber entry {args.entry!r} in catalog") from None
    else:
        if len(args.scores) != 5:
            raise UsageError("dread needs five scores: damage reproducibility exploitability affected_users discoverability")
        try:
            dread = DreadScore(*(check_score(int(s), n) for s, n in zip(args.scores, report.RADAR_AXES)))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    exact = map_dread_to_triple(dread)
    triple = integerize_triple(exact)
    print(f"overall: {report.format_number(dread_overall(dread))}")
    print(f"triple: {_fmt_triple(triple)}")
    print(f"exact triple: {_fmt_triple(exact)}")
    print(f"risk score: {report.format_number(physical_risk_score(triple))}")
    return EXIT_OK


def cmd_whatif(args: argparse.Namespace) -> int:
    catalog = _load(args.catalog)
    plan_path = _resolve(args.plan)
    try:
        plan = load_plan(plan_path)
    except OSError as exc:
        raise UsageError(f"cannot read {args.plan}: {exc.strerror or exc}") from None
    base = assemble_register(catalog)
    residuals = residual_register(base, plan, catalog)
    diff = diff_registers(base, residual_as_register(residuals, base.catalog_fingerprint))
    csv_bytes = report.emit_residual_csv(residuals)
    diff_bytes = report.emit_diff_text(diff).encode("utf-8")
    if args.out:
        out = Path(args.out)
        _write(out, "residual.csv", csv_bytes)
        _write(out, "diff.txt", diff_bytes)
    else:
        _write(None, "", csv_bytes + b"\n" + diff_bytes)
    return EXIT_OK


def cmd_prioritize(args: argparse.Namespace) -> int:
    catalog = _load(args.catalog)
    try:
        weights = (parse_number(args.w_difficulty, "--w-difficulty"), parse_number(args.w_cost, "--w-cost"))
    except (TypeError, ValueError, ArithmeticError) as exc:
        raise UsageError(str(exc)) from None
    if min(weights) < 0:
        raise UsageError("weights must be non-negative")
    priorities = prioritize_mitigations(assemble_register(catalog), catalog, weights)
    _write(Path(args.out) if args.out else None, "priorities.csv", report.emit_priority_csv(priorities))
    return EXIT_OK


def cmd_propagate(args: argparse.Namespace) -> int:
    catalog = _load(args.catalog)
    graph = catalog.dependency_graph
    if graph is None:
        raise UsageError("catalog has no dependency_graph")
    try:
        result = propagate_failure(graph, args.fail)
    except GraphError as exc:
        raise UsageError(str(exc)) from None
    _write(Path(args.out) if args.out else None, "service.json", report.dumps_service_report(result, graph))
    if not args.quiet and result.unserved_loads and args.out:
        print("unserved: " + ", ".join(result.unserved_loads), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridrisk", description="Microgrid threat/vulnerability risk assessment.")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress messages (never data)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-q", "--quiet", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable[[argparse.Namespace], int], help: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[common])
        p.set_defaults(func=func)
        return p

    catalog_help = f"catalog JSON file, or {SAMPLE_PREFIX}NAME for a shipped sample"

    p = add("validate", cmd_validate, "check a catalog and list findings")
    p.add_argument("catalog", help=catalog_help)

    p = add("assess", cmd_assess, "build the ranked risk register")
    p.add_argument("catalog", help=catalog_help)
    p.add_argument("-o", "--out", help="output directory (default: primary artifact to stdout)")
    p.add_argument("--format", choices=("csv", "doc", "markdown"), default="csv")
    p.add_argument("--include-interdependency", action="store_true", help="score dependency-graph scenarios too")

    p = add("dread", cmd_dread, "score one DREAD vector")
    p.add_argument("scores", nargs="*", help="damage reproducibility exploitability affected_users discoverability")
    p.add_argument("--catalog", help=catalog_help)
    p.add_argument("--entry", help="cyber entry id in --catalog")

    p = add("whatif", cmd_whatif, "residual register under a mitigation plan")
    p.add_argument("catalog", help=catalog_help)
    p.add_argument("plan", help=f"plan JSON file, or {SAMPLE_PREFIX}NAME")
    p.add_argument("-o", "--out", help="output directory")

    p = add("prioritize", cmd_prioritize, "rank mitigations by benefit per effort")
    p.add_argument("catalog", help=catalog_help)
    p.add_argument("--w-difficulty", default="1", help="weight on difficulty (default 1)")
    p.add_argument("--w-cost", default="1", help="weight on cost (default 1)")
    p.add_argument("-o", "--out", help="output directory")

    p = add("propagate", cmd_propagate, "which loads survive a set of utility failures")
    p.add_argument("catalog", help=catalog_help)
    p.add_argument("--fail", nargs="*", default=[], metavar="SOURCE", help="failed source node ids")
    p.add_argument("-o", "--out", help="output directory")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gridrisk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        for f in exc.findings:
            print(str(f), file=sys.stderr)
        return EXIT_FINDINGS
    except ParseError as exc:
        print(f"gridrisk: parse error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except UnknownMitigation as exc:
        print(f"gridrisk: {exc}", file=sys.stderr)
        return EXIT_FINDINGS
    except GridRiskError as exc:
        print(f"gridrisk: {exc}", file=sys.stderr)
        return EXIT_FINDINGS


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 input or I/O error, 2 no feasible embedding,
3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__
from ._numbers import format_number
from .baseline import FeasibilityMode, NoFeasibleSampleFound, sample_costs
from .formulation import build_ilp, export_lp
from .model import Embedding, IncompleteAssignment, ModelError, ValidationReport, validate_embedding
from .scenario import ScenarioError, bundled_names, resolve
from .solver import SolveParams, SolveResult, solve_exact, verify_result

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INVALID = 0, 1, 2, 3

SCHEMA_VERSION = 1
SOLVE_CSV_HEADER = ["scenario", "status", "total", "deployment", "communication", "gap", "seconds", "schema_version"]
COMPARE_CSV_HEADER = [
    "scenario",
    "method",
    "status",
    "overall",
    "deployment",
    "communication",
    "feasible_samples",
    "schema_version",
]
COMPARE_METHODS = ("optimal", "random-min", "random-mean", "random-max")
EMBEDDING_FORMAT_VERSION = 1


class CliError(Exception):
    pass


class VerificationFailed(Exception):
    """A computed result did not survive independent re-checking."""


def _err(msg: str) -> None:
    print(f"epcslice: {msg}", file=sys.stderr)


def _money(value: Optional[Fraction]) -> str:
    return "" if value is None else format_number(value)


def _load(ref: str):
    try:
        return resolve(ref)
    except FileNotFoundError:
        raise CliError(f"scenario {ref!r} not found (not bundled, no such file)") from None
    except (OSError, ScenarioError) as exc:
        raise CliError(f"cannot load scenario {ref!r}: {exc}") from None


def _params(args) -> SolveParams:
    try:
        return SolveParams(time_limit=args.time_limit, node_limit=args.node_limit, thread_count=args.threads)
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from None


def embedding_document(scenario_name: str, emb: Embedding) -> dict:
    placements = {}
    for (slice_id, vnf_id), node in sorted(emb.placements.items()):
        placements.setdefault(slice_id, {})[vnf_id] = node
    return {"format_version": EMBEDDING_FORMAT_VERSION, "scenario": scenario_name, "placements": placements}


def read_embedding(text: str, scenario_name: str, slices) -> Embedding:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"embedding file: line {exc.lineno}: {exc.msg}") from None
    if isinstance(doc, dict) and "embedding" in doc and "solver" in doc:
        doc = doc["embedding"]  # a run report
    if not isinstance(doc, dict) or set(doc) != {"format_version", "scenario", "placements"}:
        raise CliError("embedding file: expected keys format_version, scenario, placements")
    if doc["format_version"] != EMBEDDING_FORMAT_VERSION:
        raise CliError(f"embedding file: unsupported format_version {doc['format_version']!r}")
    if doc["scenario"] != scenario_name:
        raise CliError(f"embedding is for scenario {doc['scenario']!r}, not {scenario_name!r}")
    placements = {}
    raw = doc["placements"]
    if not isinstance(raw, dict):
        raise CliError("embedding file: placements must be an object")
    for slice_id, inner in raw.items():
        if not isinstance(inner, dict) or not all(isinstance(v, str) for v in inner.values()):
            raise CliError(f"embedding file: placements[{slice_id!r}] must map VNF ids to node ids")
        for vnf_id, node in inner.items():
            placements[(slice_id, vnf_id)] = node
    try:
        return Embedding.from_placements(slices, placements)
    except IncompleteAssignment:
        return Embedding(placements, {})


def run_report(name: str, result: SolveResult, verification, baseline=None) -> dict:
    solver = {
        "status": result.status.value,
        "total": _money(result.cost.total if result.cost else None),
        "deployment": _money(result.cost.deployment if result.cost else None),
        "communication": _money(result.cost.communication if result.cost else None),
        "lower_bound": _money(result.lower_bound),
        "gap": "" if result.gap is None else format_number(result.gap),
        "seconds": round(result.stats.seconds, 3),
        "nodes": result.stats.nodes,
    }
    report = {"report_version": SCHEMA_VERSION, "generator": f"epcslice {__version__}", "scenario": name, "solver": solver}
    if result.cost is not None:
        report["per_slice"] = {
            sid: {"deployment": _money(d), "communication": _money(c)} for sid, (d, c) in result.cost.per_slice.items()
        }
    report["verification"] = {"ok": verification.ok, "findings": [f"[{f.code}] {f.message}" for f in verification.findings]}
    if baseline is not None:
        report["baseline"] = baseline
    if result.embedding is not None:
        report["embedding"] = embedding_document(name, result.embedding)
    return report


def _baseline_summary(samples) -> dict:
    per_seed = []
    feasible = []
    for seed, got in samples:
        if isinstance(got, NoFeasibleSampleFound):
            per_seed.append({"seed": seed, "total": None, "note": str(got)})
        else:
            feasible.append(got)
            per_seed.append({"seed": seed, "total": _money(got.total)})
    summary = {"per_seed": per_seed, "feasible": len(feasible)}
    for name, (lo, mean, hi) in _aggregate(feasible).items():
        summary[name] = {"min": _money(lo), "mean": _money(mean), "max": _money(hi)}
    return summary


def _aggregate(costs):
    out = {}
    for name in ("total", "deployment", "communication"):
        vals = [getattr(c, name) for c in costs]
        if vals:
            out[name] = (min(vals), sum(vals, Fraction(0)) / len(vals), max(vals))
        else:
            out[name] = (None, None, None)
    return out


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_scenarios(args) -> int:
    for name in bundled_names():
        sc = resolve(name)
        vnfs = sum(len(s.vnfs) for s in sc.slices)
        print(f"{name:<16} {len(sc.net.nodes):>3} nodes {len(sc.net.edges):>3} links {vnfs:>3} VNFs")
    return EXIT_OK


def cmd_solve(args) -> int:
    sc = _load(args.scenario)
    net, slices, d_max = sc
    result = solve_exact(net, slices, d_max, _params(args))
    verification = verify_result(net, slices, d_max, result) if result.has_solution else None
    baseline = None
    if args.seeds:
        seeds = [args.seed_base + i for i in range(args.seeds)]
        baseline = _baseline_summary(sample_costs(net, slices, d_max, seeds, FeasibilityMode(args.mode), args.max_attempts))
    report = run_report(sc.name, result, verification or ValidationReport(), baseline)

    row = [
        sc.name,
        result.status.value,
        _money(result.cost.total if result.cost else None),
        _money(result.cost.deployment if result.cost else None),
        _money(result.cost.communication if result.cost else None),
        "" if result.gap is None else format_number(result.gap, 6),
        f"{result.stats.seconds:.3f}",
        SCHEMA_VERSION,
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SOLVE_CSV_HEADER)
    writer.writerow(row)
    if args.out:
        _write(args.out, json.dumps(report, indent=2) + "\n")
        _write(args.csv or str(Path(args.out).with_suffix(".csv")), buf.getvalue())
    else:
        _write(args.csv, buf.getvalue())

    if not result.has_solution:
        _err(f"{sc.name}: {result.status.value}")
        return EXIT_INFEASIBLE
    if not verification.ok:
        _err(f"{sc.name}: solver result failed independent verification:\n{verification}")
        return EXIT_INVALID
    print(
        f"{sc.name}: {result.status.value} total={_money(result.cost.total)} "
        f"(deployment {_money(result.cost.deployment)}, communication {_money(result.cost.communication)})",
        file=sys.stderr,
    )
    return EXIT_OK


def compare_rows(sc, params: SolveParams, seeds: List[int], mode: FeasibilityMode, max_attempts: int):
    """Rows for one scenario: optimal plus random min/mean/max (costs as fractions)."""
    net, slices, d_max = sc
    result = solve_exact(net, slices, d_max, params)
    if result.has_solution:
        check = verify_result(net, slices, d_max, result)
        if not check.ok:
            raise VerificationFailed(f"{sc.name}: solver result failed verification:\n{check}")
        best = (result.cost.total, result.cost.deployment, result.cost.communication)
    else:
        best = (None, None, None)
    rows = [(sc.name, "optimal", result.status.value, *best, "")]
    samples = sample_costs(net, slices, d_max, seeds, mode, max_attempts)
    feasible = [c for _, c in samples if not isinstance(c, NoFeasibleSampleFound)]
    agg = _aggregate(feasible)
    for pos, method in enumerate(COMPARE_METHODS[1:]):
        rows.append(
            (
                sc.name,
                method,
                "sampled",
                agg["total"][pos],
                agg["deployment"][pos],
                agg["communication"][pos],
                len(feasible),
            )
        )
    return result, rows


def cmd_compare(args) -> int:
    scenarios = [_load(ref) for ref in (args.scenario or ["one", "two", "three"])]
    seeds = [args.seed_base + i for i in range(args.seeds)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_CSV_HEADER)
    status = EXIT_OK
    for sc in scenarios:
        result, rows = compare_rows(sc, _params(args), seeds, FeasibilityMode(args.mode), args.max_attempts)
        if not result.has_solution:
            status = EXIT_INFEASIBLE
        for name, method, st, overall, dep, com, n in rows:
            writer.writerow([name, method, st, _money(overall), _money(dep), _money(com), n, SCHEMA_VERSION])
    _write(args.out, buf.getvalue())
    return status


def cmd_validate(args) -> int:
    sc = _load(args.scenario)
    net, slices, d_max = sc
    try:
        text = Path(args.embedding).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read embedding file: {exc}") from None
    emb = read_embedding(text, sc.name, slices)
    report = validate_embedding(net, slices, emb, d_max)
    print(report)
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_export_lp(args) -> int:
    sc = _load(args.scenario)
    net, slices, d_max = sc
    ilp = build_ilp(net, slices, d_max)
    try:
        text = export_lp(ilp)
    except ValueError as exc:
        raise CliError(f"{sc.name}: {exc}") from None
    _write(args.out, text)
    print(f"{sc.name}: {len(ilp.variables)} binaries, {len(ilp.constraints)} rows", file=sys.stderr)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epcslice", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"epcslice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def solver_opts(p):
        p.add_argument("--time-limit", type=float, default=None, help="seconds (default: unlimited)")
        p.add_argument("--node-limit", type=int, default=None, help="search nodes; a deterministic budget")
        p.add_argument("--threads", type=int, default=1)

    def sampling_opts(p, default_seeds):
        p.add_argument("--seeds", type=int, default=default_seeds, help="number of random-baseline seeds")
        p.add_argument("--seed-base", type=int, default=0)
        p.add_argument("--mode", choices=[m.value for m in FeasibilityMode], default=FeasibilityMode.FULL.value)
        p.add_argument("--max-attempts", type=int, default=10000)

    sub.add_parser("scenarios", help="list bundled scenarios")

    p = sub.add_parser("solve", help="solve one scenario exactly")
    p.add_argument("--scenario", required=True)
    solver_opts(p)
    sampling_opts(p, 0)
    p.add_argument("--out", help="run report (JSON); the CSV row goes next to it")
    p.add_argument("--csv", help="CSV output path (default: next to --out, else stdout)")

    p = sub.add_parser("compare", help="optimal versus random placement, plot-ready CSV")
    p.add_argument("--scenario", action="append", help="repeatable; default: one, two, three")
    solver_opts(p)
    sampling_opts(p, 30)
    p.add_argument("--out", help="CSV path (default stdout)")

    p = sub.add_parser("validate", help="check an embedding file against a scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--embedding", required=True)

    p = sub.add_parser("export-lp", help="write the ILP in CPLEX LP format")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", help="LP path (default stdout)")
    return parser


COMMANDS = {
    "scenarios": cmd_scenarios,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "validate": cmd_validate,
    "export-lp": cmd_export_lp,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if getattr(args, "threads", 1) < 1:
            raise CliError("--threads must be positive")
        if getattr(args, "seeds", 0) < 0:
            raise CliError("--seeds must be nonnegative")
        if getattr(args, "max_attempts", 1) < 1:
            raise CliError("--max-attempts must be positive")
        return COMMANDS[args.command](args)
    except CliError as exc:
        _err(str(exc))
        return EXIT_INPUT
    except VerificationFailed as exc:
        _err(str(exc))
        return EXIT_INVALID
    except ModelError as exc:
        _err(f"invalid input: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

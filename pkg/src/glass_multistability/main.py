"""
Command-line entry point:

    python -m src.glass_multistability.main <subcommand> [options]

Exit codes: 0 success, 1 usage/parse/limit errors, 2 output-constraint
violation, 3 oracle or theorem-consistency mismatch.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .config import get_setting
from .core import all_subsets
from .coupling import compose_check, coupling_check, decompose_check, triple_coupling_check
from .dynamics import sample_trajectory, simulate, vector_field_grid
from .factorization import factorize, factorize_blocks, verify_blocks, verify_factorization
from .logging_utils import log_error, log_event, set_console_level
from .models import (
    ConstraintViolationError,
    CountMode,
    FamilyKind,
    GlassNetworkError,
    IndexSet,
    InternalConsistencyError,
    StableFamily,
)
from .network import GlassNetwork, load_network
from .oracle import SCOPES, run_oracle
from .reporting import (
    blocks_to_dict,
    factorization_to_dict,
    open_output,
    oracle_report_to_dict,
    report_to_dict,
    trajectory_to_dict,
    verdict_to_dict,
    write_csv,
    write_json_lines,
)
from .signs import (
    allows_family,
    allows_stable,
    bound_curves,
    count_allowed_row_signatures,
    count_allowed_sign_patterns,
    counted_rows,
    ei_bounds,
    formula_discrepancies,
    is_sign_stable,
    parse_family,
    sign_pattern,
    sign_stable_sets,
)
from .stability import enumerate_stable_sets, minimally_stable_sets

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSTRAINT = 2
EXIT_MISMATCH = 3

COMMANDS = ("analyze", "signs", "curves", "factor", "couple", "simulate", "field", "oracle")


class CliArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1 (2 means constraint violation here)."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    network_path: Optional[str] = None
    output: Optional[str] = None
    format: Optional[str] = None
    seed: int = 0
    allow_violations: bool = False
    verbose: bool = False
    options: Dict[str, Any] = field(default_factory=dict)


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fixed_coordinate(text: str):
    axis, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return int(axis), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected INDEX=VALUE, got {text!r}")


def build_parser() -> CliArgumentParser:
    common = CliArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default=None, help="Output file (default: standard output)")
    common.add_argument("--format", choices=["json", "csv"], default=None, help="Output format")
    common.add_argument("--seed", type=int, default=0, help="Seed for randomized checks (default 0)")
    common.add_argument("--allow-violations", action="store_true",
                        help="Analyze networks that violate the output constraint")
    common.add_argument("--verbose", "-v", action="store_true", help="Show informational log messages")

    parser = CliArgumentParser(
        prog="glassnet",
        description="Stable sets, sign patterns and dynamics of Glass networks dx/dt = -x + W theta(x).")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{" + ",".join(COMMANDS) + "}")

    p = sub.add_parser("analyze", parents=[common], help="Enumerate stable sets")
    p.add_argument("network")
    p.add_argument("--all", action="store_true", help="Report every admissible set, not only stable ones")
    p.add_argument("--minimal", action="store_true", help="Report only minimally stable sets")

    p = sub.add_parser("signs", parents=[common], help="Sign-pattern conditions and counts")
    p.add_argument("network", nargs="?")
    p.add_argument("--pattern-of", metavar="NETWORK", help="Network file whose sign pattern is emitted")
    p.add_argument("--allows", "--set", dest="set", metavar="SET", help="Set to test, e.g. 1,3")
    p.add_argument("--family", help="Family to analyze, e.g. nested:1;1,2")
    p.add_argument("--ei-bounds", action="store_true", help="Report the E/I bounds of the family")
    p.add_argument("--count-signatures", metavar="MODE", choices=[m.value for m in CountMode],
                   help="Report the family's allowed row signatures in this mode")
    p.add_argument("--n", type=int, help="Dimension when no network is given")
    p.add_argument("--mode", choices=[m.value for m in CountMode], default=CountMode.UNCONSTRAINED.value)

    p = sub.add_parser("curves", parents=[common], help="Excitatory/inhibitory bound curves")
    p.add_argument("--kind", choices=[k.value for k in FamilyKind], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sets", type=int, default=2, help="Number of disjoint sets")
    p.add_argument("--step", type=int, default=1, help="Size increment of a nested chain")
    p.add_argument("--mode", choices=[CountMode.UNCONSTRAINED.value, CountMode.VANISHING_INPUT.value],
                   default=CountMode.UNCONSTRAINED.value)

    p = sub.add_parser("factor", parents=[common], help="Semipositive factorization of a stable set")
    p.add_argument("network")
    p.add_argument("--set", required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--blocks", action="store_true", help="Blockwise factorization")

    p = sub.add_parser("couple", parents=[common], help="Composition, decomposition and coupling tests")
    p.add_argument("network")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--compose", nargs=2, metavar=("A", "B"))
    group.add_argument("--decompose", nargs=2, metavar=("G", "A"))
    group.add_argument("--couple", nargs=2, metavar=("A", "B"))
    group.add_argument("--triple", nargs=3, metavar=("A", "B", "G"))

    p = sub.add_parser("simulate", parents=[common], help="Exact piecewise simulation")
    p.add_argument("network")
    p.add_argument("--x0", type=_float_list, required=True)
    p.add_argument("--max-time", type=float, default=50.0)
    p.add_argument("--max-switches", type=int, default=10000)
    p.add_argument("--sample-dt", type=float, default=None)

    p = sub.add_parser("field", parents=[common], help="Vector field on a grid over two free axes")
    p.add_argument("network")
    p.add_argument("--range", nargs=3, type=float, action="append", metavar=("MIN", "MAX", "STEPS"),
                   required=True, help="Axis range; give once for both axes or twice")
    p.add_argument("--fix", type=_fixed_coordinate, action="append", default=[], metavar="INDEX=VALUE")

    p = sub.add_parser("oracle", parents=[common], help="Seeded self-checks against brute force")
    scope = p.add_mutually_exclusive_group()
    for name in SCOPES + ("all",):
        scope.add_argument(f"--{name}", dest="scope", action="store_const", const=name)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--mode", choices=[m.value for m in CountMode] + ["all"], default="all")
    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = vars(args)
    config = RunConfig(
        command=values.pop("command"),
        network_path=values.pop("network", None),
        output=values.pop("output"),
        format=values.pop("format"),
        seed=values.pop("seed"),
        allow_violations=values.pop("allow_violations"),
        verbose=values.pop("verbose"),
    )
    config.options = values
    return config


# --- Commands ---

def _network(config: RunConfig) -> GlassNetwork:
    return load_network(config.network_path, config.allow_violations)


def _emit(config: RunConfig, records: List[Dict[str, Any]], fieldnames: Optional[Sequence[str]] = None,
          default_format: str = "json") -> None:
    fmt = config.format or default_format
    with open_output(config.output) as stream:
        if fmt == "csv":
            names = list(fieldnames or (records[0].keys() if records else []))
            write_csv(records, names, stream)
        else:
            write_json_lines(records, stream)


def _flatten(record: Dict[str, Any]) -> Dict[str, Any]:
    """Lists become space-separated strings for CSV cells."""
    return {k: " ".join(str(v) for v in value) if isinstance(value, list) else value for k, value in record.items()}


def cmd_analyze(config: RunConfig) -> int:
    net = _network(config)
    reports = enumerate_stable_sets(net, include_all=config.options["all"])
    if config.options["minimal"]:
        minimal = {a.mask for a in minimally_stable_sets(net, reports)}
        reports = [r for r in reports if r.set.mask in minimal]
    records = [report_to_dict(r) for r in reports]
    if (config.format or "json") == "csv":
        records = [_flatten(r) for r in records]
    _emit(config, records, ["set", "verdict", "attractor", "margin", "boundary_candidate", "near_degenerate"])
    return EXIT_OK


def _family_record(fam: StableFamily, n: int, opts: Dict[str, Any], net: Optional[GlassNetwork]) -> Dict[str, Any]:
    """Bounds and signature counts of a family; both unless one is asked for explicitly."""
    want_bounds = opts["ei_bounds"] or not opts["count_signatures"]
    want_counts = bool(opts["count_signatures"]) or not opts["ei_bounds"]
    record: Dict[str, Any] = {"family": str(fam)}

    if want_bounds:
        bounds = ei_bounds(fam, n)
        record["E_bound"] = bounds.min_excitatory
        record["I_bound"] = bounds.min_inhibitory
    if want_counts:
        mode = CountMode(opts["count_signatures"] or opts["mode"])
        record["mode"] = mode.value
        record["row_counts"] = [{"row": row, "count": count_allowed_row_signatures(fam, n, row, mode)}
                                for row in counted_rows(n, mode)]
        record["sign_patterns"] = count_allowed_sign_patterns(fam, n, mode)
        free = n - 1 if mode is CountMode.NONVANISHING_INPUT else n
        if free <= get_setting("signature_cap"):
            record["discrepancies"] = formula_discrepancies(fam, n, mode)
    if net is not None:
        record["allowed_by_network"] = allows_family(sign_pattern(net.weights), fam)
    return record


def cmd_signs(config: RunConfig) -> int:
    opts = config.options
    if config.network_path and opts["pattern_of"] and config.network_path != opts["pattern_of"]:
        raise ValueError("Give the network either positionally or with --pattern-of, not both")
    path = config.network_path or opts["pattern_of"]
    net = load_network(path, config.allow_violations) if path else None
    n = net.n if net is not None else opts["n"]
    if n is None:
        raise ValueError("signs needs a network file or --n")
    if not opts["family"] and (opts["ei_bounds"] or opts["count_signatures"]):
        raise ValueError("--ei-bounds and --count-signatures need --family")
    records: List[Dict[str, Any]] = []

    if opts["pattern_of"]:
        records.append({"network": path, "pattern": sign_pattern(net.weights).s.tolist()})

    if opts["family"]:
        records.append(_family_record(parse_family(n, opts["family"]), n, opts, net))
    elif net is not None and (opts["set"] or not opts["pattern_of"]):
        s = sign_pattern(net.weights)
        targets = [IndexSet.parse(n, opts["set"])] if opts["set"] else [a for a in all_subsets(n) if not a.is_empty()]
        required = {a.mask for a in sign_stable_sets(s)}
        for a in targets:
            records.append({
                "set": a.to_list(),
                "allows_stable": allows_stable(s, a),
                "sign_stable": is_sign_stable(s, a) if opts["set"] else a.mask in required,
            })
    elif net is None:
        raise ValueError("signs without a network needs --family")

    if (config.format or "json") == "csv":
        rows = []
        for r in records:
            r = {k: v for k, v in r.items() if k not in ("row_counts", "discrepancies")}
            if "pattern" in r:
                r["pattern"] = "; ".join(" ".join(str(v) for v in row) for row in r["pattern"])
            rows.append(_flatten(r))
        records = rows
    _emit(config, records)
    return EXIT_OK


def cmd_curves(config: RunConfig) -> int:
    opts = config.options
    curve = bound_curves(FamilyKind(opts["kind"]), opts["n"], opts["sets"], opts["step"], CountMode(opts["mode"]))
    records = [{**row, "allowed_fraction": float(row["allowed_fraction"])} for row in curve]
    _emit(config, records, ["k", "E_bound", "I_bound", "allowed_fraction"], default_format="csv")
    return EXIT_OK


def cmd_factor(config: RunConfig) -> int:
    net = _network(config)
    a = IndexSet.parse(net.n, config.options["set"])
    epsilon = config.options["epsilon"]
    if config.options["blocks"]:
        blocks = factorize_blocks(net, a, epsilon)
        check = verify_blocks(blocks)
        record = {**blocks_to_dict(blocks), "ok": check.ok, "residual": check.residual,
                  "violations": check.violations}
    else:
        f = factorize(net, a, epsilon)
        record = factorization_to_dict(f, verify_factorization(f, net))
    with open_output(config.output) as stream:
        write_json_lines([record], stream)
    return EXIT_OK


def cmd_couple(config: RunConfig) -> int:
    net = _network(config)
    opts = config.options

    def sets(texts):
        return [IndexSet.parse(net.n, t) for t in texts]

    if opts["compose"]:
        verdict = compose_check(net, *sets(opts["compose"]))
    elif opts["decompose"]:
        verdict = decompose_check(net, *sets(opts["decompose"]))
    elif opts["couple"]:
        verdict = coupling_check(net, *sets(opts["couple"]))
    else:
        verdict = triple_coupling_check(net, *sets(opts["triple"]))
    with open_output(config.output) as stream:
        write_json_lines([verdict_to_dict(verdict)], stream)
    return EXIT_OK


def cmd_simulate(config: RunConfig) -> int:
    net = _network(config)
    opts = config.options
    traj = simulate(net, opts["x0"], opts["max_time"], opts["max_switches"])

    if opts["sample_dt"] is not None and config.format == "csv":
        samples = sample_trajectory(traj, opts["sample_dt"])
        names = ["t"] + [f"x{i}" for i in range(1, net.n + 1)]
        _emit(config, [dict(zip(names, row)) for row in samples.tolist()], names)
        return EXIT_OK

    record = trajectory_to_dict(traj)
    if opts["sample_dt"] is not None:
        record["samples"] = sample_trajectory(traj, opts["sample_dt"]).tolist()
    with open_output(config.output) as stream:
        write_json_lines([record], stream)
    return EXIT_OK


def cmd_field(config: RunConfig) -> int:
    net = _network(config)
    opts = config.options
    ranges = [(low, high, int(steps)) for low, high, steps in opts["range"]]
    rows = vector_field_grid(net, ranges, dict(opts["fix"]))
    _emit(config, rows, ["x", "y", "vx", "vy"], default_format="csv")
    return EXIT_OK


def cmd_oracle(config: RunConfig) -> int:
    opts = config.options
    scope = opts["scope"] or "all"
    modes = list(CountMode) if opts["mode"] == "all" else [CountMode(opts["mode"])]
    report = run_oracle(scope, opts["n"], opts["trials"], config.seed, modes)
    with open_output(config.output) as stream:
        write_json_lines([oracle_report_to_dict(report)], stream)

    if report.passed:
        what = "all formulas match brute force" if scope == "counts" else "all checks passed"
        print(f"oracle {scope}: {what} ({report.checks} checks, {len(report.diagnostics)} diagnostics)",
              file=sys.stderr)
        return EXIT_OK
    print(f"oracle {scope}: {len(report.mismatches)} mismatches in {report.checks} checks", file=sys.stderr)
    return EXIT_MISMATCH


HANDLERS = {
    "analyze": cmd_analyze,
    "signs": cmd_signs,
    "curves": cmd_curves,
    "factor": cmd_factor,
    "couple": cmd_couple,
    "simulate": cmd_simulate,
    "field": cmd_field,
    "oracle": cmd_oracle,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand and map failures to exit codes."""
    if config.verbose:
        set_console_level(logging.INFO)
    log_event("CLI", f"Running {config.command}", {"network": config.network_path, "seed": config.seed})
    try:
        return HANDLERS[config.command](config)
    except ConstraintViolationError as e:
        print(f"error: {e}", file=sys.stderr)
        for violation in e.violations:
            print(f"  violating code: {violation}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except InternalConsistencyError as e:
        log_error("CLI", "InternalConsistency", str(e), exception=e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except (GlassNetworkError, ValueError, ArithmeticError) as e:
        log_error("CLI", type(e).__name__, str(e), {"command": config.command})
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(parse_arguments(argv))


if __name__ == "__main__":
    sys.exit(main())

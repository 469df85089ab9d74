"""Command-line interface.

    twincontract design [SCENARIO] [--mechanism asymmetric|complete|social] [--data-mb D]
    twincontract feasibility [SCENARIO] [--data-mb D]
    twincontract sweep [SCENARIO] --out PATH [--mechanisms asymmetric,complete,social] [--workers N]
    twincontract scenario [SCENARIO]

SCENARIO is a TOML file path, ``default`` for the shipped scenario, or ``-``
(the default) for $TWINCONTRACT_SCENARIO falling back to the shipped one.

Exit codes: 0 success, 1 validation error, 2 no admissible bandwidth.
"""

import argparse
import json
import logging
import os
import sys
from typing import List, NoReturn, Optional, TextIO

from twincontract import __version__
from twincontract.core.channel import capacity_ceiling
from twincontract.core.contract import ContractOutcome
from twincontract.core.errors import InfeasibleBandwidthError, NoAdmissibleBandwidthError, ScenarioError
from twincontract.experiments.harness import (
    MECHANISM_ALIASES,
    run_feasibility_matrix,
    run_mechanism,
    sweep_data_size,
    write_sweep_csv,
)
from twincontract.experiments.scenario import BITS_PER_MB, Scenario, load_default_scenario, load_scenario

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger("twincontract.cli")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; here 2 means infeasible, so usage errors exit 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def resolve_scenario(ref: str) -> Scenario:
    if ref == "-":
        ref = os.getenv("TWINCONTRACT_SCENARIO", "default")
    if ref == "default":
        return load_default_scenario()
    return load_scenario(ref)


def _params(scenario: Scenario, data_mb: Optional[float]):
    if data_mb is None:
        return scenario.params
    return scenario.with_data_bits(data_mb * BITS_PER_MB)


def _print_outcome(outcome: ContractOutcome, scenario: Scenario, out: TextIO) -> None:
    print(f"mechanism: {outcome.mechanism}", file=out)
    print(f"{'type':>4}  {'theta':>12}  {'Q':>6}  {'bandwidth_hz':>14}  {'reward':>14}  {'mrp_utility':>14}", file=out)
    rows = zip(scenario.spectrum.types, outcome.contract, outcome.mrp_utilities)
    for n, (t, item, u) in enumerate(rows, start=1):
        print(
            f"{n:>4}  {t.theta:>12.6g}  {t.probability:>6.3g}  {item.bandwidth_hz:>14.6g}"
            f"  {item.reward:>14.6g}  {u:>14.6g}",
            file=out,
        )
    if outcome.bunches:
        print(f"bunched types: {outcome.bunches}", file=out)
    print(f"msp_utility: {outcome.msp_utility:.12g}", file=out)
    print(f"mrp_sum_utility: {outcome.mrp_sum_utility:.12g}", file=out)
    print(f"welfare: {outcome.welfare:.12g}", file=out)


def cmd_design(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    params = _params(scenario, args.data_mb)
    outcome = run_mechanism(args.mechanism, scenario.grid, scenario.spectrum, params)
    _print_outcome(outcome, scenario, sys.stdout)
    return EXIT_OK


def cmd_feasibility(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    data_bits = None if args.data_mb is None else args.data_mb * BITS_PER_MB
    matrix = run_feasibility_matrix(scenario, data_bits)
    n_types = matrix.utilities.shape[0]

    print("utility of type n (rows) choosing item j (columns)")
    print("      " + "".join(f"{f'item {j}':>14}" for j in range(1, n_types + 1)))
    for n in range(n_types):
        print(f"type {n + 1}" + "".join(f"{value:>14.6g}" for value in matrix.utilities[n]))
    for n in range(n_types):
        ir = "ok" if matrix.ir_ok[n] else "VIOLATED"
        ic = "ok" if matrix.ic_ok[n] else "VIOLATED"
        print(f"type {n + 1}: IR {ir}, IC {ic}")
    print("verdict: " + ("feasible" if matrix.passed else "infeasible"))
    return EXIT_OK if matrix.passed else EXIT_INFEASIBLE


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    rows = sweep_data_size(scenario, args.mechanisms, workers=args.workers)
    if args.out == "-":
        write_sweep_csv(rows, sys.stdout, scenario.digest, scenario.spectrum.size)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as f:
            write_sweep_csv(rows, f, scenario.digest, scenario.spectrum.size)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_scenario(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    channel = scenario.params.channel
    task = scenario.params.task
    summary = {
        "name": scenario.name,
        "digest": scenario.digest,
        "channel": {
            "transmit_power_w": channel.transmit_power_w,
            "noise_density_w_hz": channel.noise_density_w_hz,
            "gain": channel.gain,
            "capacity_ceiling_bps": capacity_ceiling(channel),
        },
        "task": {"data_bits": task.data_bits, "fixed_time_s": task.fixed_time_s, "max_aomt_s": task.max_aomt_s},
        "beta": scenario.params.beta,
        "population": scenario.spectrum.population,
        "thetas": scenario.spectrum.thetas.tolist(),
        "probabilities": scenario.spectrum.probabilities.tolist(),
        "grid": {
            "b_min": scenario.grid.b_min,
            "b_max": scenario.grid.b_max,
            "step": scenario.grid.step,
            "points": scenario.grid.size,
        },
        "sweep_data_bits": list(scenario.sweep_data_bits),
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twincontract", description="Bandwidth incentive contracts for vehicle-twin migration.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=os.getenv("LOG_LEVEL", "WARNING"),
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="log verbosity (default: $LOG_LEVEL or WARNING)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_arg(p: argparse.ArgumentParser) -> None:
        p.add_argument("scenario", nargs="?", default="-", help="scenario file, 'default', or '-' (default)")

    design = sub.add_parser("design", help="design one mechanism's contract and print its items")
    scenario_arg(design)
    design.add_argument("--mechanism", default="asymmetric", choices=sorted(MECHANISM_ALIASES))
    design.add_argument("--data-mb", type=float, default=None, help="override the task data size (MB)")
    design.set_defaults(func=cmd_design)

    feasibility = sub.add_parser("feasibility", help="print the type-by-item utility matrix and IR/IC verdicts")
    scenario_arg(feasibility)
    feasibility.add_argument("--data-mb", type=float, default=None, help="override the task data size (MB)")
    feasibility.set_defaults(func=cmd_feasibility)

    sweep = sub.add_parser("sweep", help="sweep the data size and write CSV")
    scenario_arg(sweep)
    sweep.add_argument("--out", required=True, help="CSV path, or '-' for stdout")
    sweep.add_argument("--mechanisms", default="asymmetric,complete,social", help="comma-separated mechanisms")
    sweep.add_argument("--workers", type=int, default=1, help="threads for independent sweep points")
    sweep.set_defaults(func=cmd_sweep)

    show = sub.add_parser("scenario", help="print the resolved scenario in linear units")
    scenario_arg(show)
    show.set_defaults(func=cmd_scenario)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(message)s")

    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NoAdmissibleBandwidthError, InfeasibleBandwidthError) as exc:
        logger.error(json.dumps({"event": "solver_failed", "command": args.command, "reason": str(exc)}))
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""Experiment harness: mechanism dispatch, feasibility matrices and data-size sweeps."""

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from twincontract.core.baselines import complete_info_contract, social_welfare_contract
from twincontract.core.contract import IC_TOLERANCE, ContractOutcome, GridSpec, check_feasibility, design_contract
from twincontract.core.economics import ScenarioParams, TypeSpectrum
from twincontract.core.errors import NoAdmissibleBandwidthError
from twincontract.experiments.scenario import Scenario

logger = logging.getLogger("twincontract.experiments")

MECHANISMS: Tuple[str, ...] = ("asymmetric", "complete-info", "social-welfare")

MECHANISM_ALIASES: Dict[str, str] = {
    "asymmetric": "asymmetric",
    "complete": "complete-info",
    "complete-info": "complete-info",
    "social": "social-welfare",
    "social-welfare": "social-welfare",
}

STATUS_OK = "ok"
STATUS_NO_ADMISSIBLE = "no-admissible-bandwidth"

_SOLVERS: Dict[str, Callable[[GridSpec, TypeSpectrum, ScenarioParams], ContractOutcome]] = {
    "asymmetric": design_contract,
    "complete-info": complete_info_contract,
    "social-welfare": social_welfare_contract,
}


def parse_mechanisms(names: Iterable[str]) -> Tuple[str, ...]:
    """Canonical mechanism names in harness order; accepts the short CLI aliases."""
    if isinstance(names, str):
        names = names.split(",")
    chosen = set()
    for name in names:
        key = name.strip().lower()
        if not key:
            continue
        if key not in MECHANISM_ALIASES:
            raise ValueError(f"unknown mechanism {name!r}; choose from {', '.join(sorted(MECHANISM_ALIASES))}")
        chosen.add(MECHANISM_ALIASES[key])
    if not chosen:
        raise ValueError("at least one mechanism is required")
    return tuple(m for m in MECHANISMS if m in chosen)


def run_mechanism(
    mechanism: str,
    grid: GridSpec,
    spectrum: TypeSpectrum,
    params: ScenarioParams,
) -> ContractOutcome:
    """Design the contract of one mechanism ("asymmetric", "complete-info" or "social-welfare")."""
    canonical = MECHANISM_ALIASES.get(mechanism)
    if canonical is None:
        raise ValueError(f"unknown mechanism {mechanism!r}")
    return _SOLVERS[canonical](grid, spectrum, params)


# ── Feasibility matrix ────────────────────────────────────────────────────────

@dataclass
class FeasibilityMatrix:
    """Utility of every type under every contract item, with IR/IC verdicts.

    Attributes:
        utilities: utilities[n, j] = R_j - b_j^2 / theta_n (0-based rows/columns)
        ir_ok: Per-type verdict: own-item utility is non-negative
        ic_ok: Per-type verdict: own item is the row maximum
        outcome: The designed contract
    """
    utilities: np.ndarray
    ir_ok: List[bool]
    ic_ok: List[bool]
    outcome: ContractOutcome

    @property
    def passed(self) -> bool:
        return all(self.ir_ok) and all(self.ic_ok)


def run_feasibility_matrix(
    scenario: Scenario,
    data_bits: Optional[float] = None,
    tolerance: float = IC_TOLERANCE,
) -> FeasibilityMatrix:
    """Design the asymmetric-information contract and tabulate U(type n, item j)."""
    params = scenario.params if data_bits is None else scenario.with_data_bits(data_bits)
    outcome = design_contract(scenario.grid, scenario.spectrum, params)
    report = check_feasibility(outcome.contract, scenario.spectrum, tolerance)
    utilities = report.ic_matrix
    ic_ok = [
        bool(np.all(utilities[n, n] >= utilities[n] - tolerance))
        for n in range(utilities.shape[0])
    ]
    return FeasibilityMatrix(utilities=utilities, ir_ok=list(report.ir_satisfied), ic_ok=ic_ok, outcome=outcome)


# ── Data-size sweep ───────────────────────────────────────────────────────────

@dataclass
class SweepRow:
    """One (mechanism, D) point of a data-size sweep.

    Failed points keep ``status`` = "no-admissible-bandwidth" and no utilities.
    """
    data_bits: float
    mechanism: str
    msp_utility: Optional[float] = None
    mrp_sum_utility: Optional[float] = None
    bandwidths: List[float] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    status: str = STATUS_OK


def _sweep_point(scenario: Scenario, mechanism: str, data_bits: float) -> SweepRow:
    try:
        outcome = run_mechanism(mechanism, scenario.grid, scenario.spectrum, scenario.with_data_bits(data_bits))
    except NoAdmissibleBandwidthError as exc:
        logger.warning(json.dumps({
            "event": "sweep_row_failed",
            "mechanism": mechanism,
            "data_bits": data_bits,
            "reason": str(exc),
        }))
        return SweepRow(data_bits=data_bits, mechanism=mechanism, status=STATUS_NO_ADMISSIBLE)
    return SweepRow(
        data_bits=data_bits,
        mechanism=mechanism,
        msp_utility=outcome.msp_utility,
        mrp_sum_utility=outcome.mrp_sum_utility,
        bandwidths=outcome.contract.bandwidths,
        rewards=outcome.contract.rewards,
    )


def _warn_if_not_decreasing(rows: Sequence[SweepRow]) -> None:
    for mechanism in MECHANISMS:
        values = [r.msp_utility for r in rows if r.mechanism == mechanism and r.msp_utility is not None]
        if any(later > earlier + IC_TOLERANCE * max(1.0, abs(earlier)) for earlier, later in zip(values, values[1:])):
            logger.warning(json.dumps({"event": "msp_utility_not_decreasing", "mechanism": mechanism}))


def sweep_data_size(
    scenario: Scenario,
    mechanisms: Sequence[str] = MECHANISMS,
    data_bits: Optional[Sequence[float]] = None,
    workers: int = 1,
) -> List[SweepRow]:
    """Solve every (mechanism, D) pair of the sweep.

    Rows come back ordered by mechanism (harness order) then ascending D,
    whatever the number of workers. A D with no admissible bandwidth yields a
    failed row instead of aborting the sweep.

    Args:
        scenario: Resolved scenario
        mechanisms: Mechanism names or CLI aliases
        data_bits: Data sizes to sweep; defaults to the scenario's sweep section
        workers: Thread count for independent sweep points
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    chosen = parse_mechanisms(mechanisms)
    sizes = sorted(float(d) for d in (scenario.sweep_data_bits if data_bits is None else data_bits))
    points = [(m, d) for m in chosen for d in sizes]

    if workers == 1:
        rows = [_sweep_point(scenario, m, d) for m, d in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda point: _sweep_point(scenario, *point), points))

    _warn_if_not_decreasing(rows)
    logger.info(json.dumps({
        "event": "sweep_completed",
        "scenario": scenario.digest,
        "rows": len(rows),
        "failed": sum(r.status != STATUS_OK for r in rows),
    }))
    return rows


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.12g}"


def sweep_header(n_types: int) -> List[str]:
    return (
        ["scenario_hash", "mechanism", "data_bits"]
        + [f"b_{n}" for n in range(1, n_types + 1)]
        + [f"R_{n}" for n in range(1, n_types + 1)]
        + ["msp_utility", "mrp_sum_utility", "status"]
    )


def write_sweep_csv(rows: Sequence[SweepRow], stream: TextIO, scenario_hash: str, n_types: int) -> None:
    """Write sweep rows as CSV with 12 significant digits per float."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(sweep_header(n_types))
    for row in rows:
        bandwidths = row.bandwidths or [None] * n_types
        rewards = row.rewards or [None] * n_types
        writer.writerow(
            [scenario_hash, row.mechanism, _fmt(row.data_bits)]
            + [_fmt(b) for b in bandwidths]
            + [_fmt(r) for r in rewards]
            + [_fmt(row.msp_utility), _fmt(row.mrp_sum_utility), row.status]
        )

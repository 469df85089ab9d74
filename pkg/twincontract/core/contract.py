"""Optimal contract design under information asymmetry.

The solver follows the grid-search design loop:
1. For every type independently, scan the bandwidth grid and keep the point
   that maximises M * (Q_n * S(b) - e_n * b^2).
2. If the per-type maximisers are not monotone in the type order, pool
   adjacent violating types into bunches sharing one bandwidth (ironing).
3. Price the monotone allocation with the least rewards that keep every
   type's IR and IC constraints satisfied.

Type indices in reports and in ``per_type_objective`` are 1-based.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from twincontract.core.economics import (
    Contract,
    ContractItem,
    ScenarioParams,
    TypeSpectrum,
    e_coefficients,
    mrp_sum_utility,
    mrp_utilities,
    mrp_utility,
    msp_expected_utility,
    satisfaction_profile,
    social_welfare,
)
from twincontract.core.errors import NoAdmissibleBandwidthError

logger = logging.getLogger("twincontract.contract")

IC_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Bandwidth search grid {b_min, b_min + step, ...} within [b_min, b_max].

    Attributes:
        b_min: Smallest bandwidth considered (Hz)
        b_max: Largest bandwidth considered (Hz)
        step: Grid spacing phi (Hz)
    """
    b_min: float = 1e5
    b_max: float = 4e7
    step: float = 1e4

    def __post_init__(self):
        if not 0 < self.b_min < self.b_max:
            raise ValueError(f"grid needs 0 < b_min < b_max, got b_min={self.b_min}, b_max={self.b_max}")
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if (self.b_max - self.b_min) / self.step < 1:
            raise ValueError("grid step is wider than [b_min, b_max]; the grid needs at least two points")

    @property
    def size(self) -> int:
        # slack absorbs ratios such as 0.3 / 0.1 landing just below an integer
        return int(math.floor((self.b_max - self.b_min) / self.step + 1e-9)) + 1

    def points(self) -> np.ndarray:
        # last point may round one ulp past b_max
        return np.minimum(self.b_min + self.step * np.arange(self.size, dtype=float), self.b_max)


@dataclass(frozen=True)
class Violation:
    """A violated IR or IC constraint.

    Attributes:
        kind: "IR" or "IC"
        indices: (n,) for IR; (n, j) for "type n prefers item j" under IC
        slack: Constraint slack; negative beyond the tolerance
    """
    kind: str
    indices: Tuple[int, ...]
    slack: float


@dataclass
class FeasibilityReport:
    """IR/IC evaluation of a contract.

    Attributes:
        ir_satisfied: Per-type IR verdict
        ic_matrix: ic_matrix[n, j] is the utility of type n+1 choosing item j+1
        violations: Every violated constraint, IR first then IC by row
    """
    ir_satisfied: List[bool]
    ic_matrix: np.ndarray
    violations: List[Violation] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not self.violations


@dataclass
class ContractOutcome:
    """A priced contract together with the utilities it produces.

    Attributes:
        mechanism: Mechanism that produced the contract
        contract: One item per type, in type order
        msp_utility: Expected MSP utility of the contract
        mrp_utilities: Own-item utility of every type
        mrp_sum_utility: Population-expected MRP surplus
        welfare: Satisfaction minus MRP cost, summed over the population
        raw_bandwidths: Per-type grid maximisers before ironing
        bunches: 1-based (first, last) type ranges pooled by ironing
    """
    mechanism: str
    contract: Contract
    msp_utility: float
    mrp_utilities: List[float]
    mrp_sum_utility: float
    welfare: float
    raw_bandwidths: List[float]
    bunches: List[Tuple[int, int]] = field(default_factory=list)


def check_feasibility(
    contract: Sequence[ContractItem],
    spectrum: TypeSpectrum,
    tolerance: float = IC_TOLERANCE,
) -> FeasibilityReport:
    """Evaluate IR for every type and IC for every ordered pair of distinct types."""
    if len(contract) != spectrum.size:
        raise ValueError(f"contract has {len(contract)} items but the spectrum has {spectrum.size} types")

    n_types = spectrum.size
    matrix = np.array([
        [mrp_utility(item, t.theta) for item in contract]
        for t in spectrum.types
    ], dtype=float).reshape(n_types, n_types)

    violations: List[Violation] = []
    ir_satisfied = []
    for n in range(n_types):
        own = matrix[n, n]
        ok = own >= -tolerance
        ir_satisfied.append(bool(ok))
        if not ok:
            violations.append(Violation("IR", (n + 1,), float(own)))

    for n in range(n_types):
        for j in range(n_types):
            if j == n:
                continue
            slack = matrix[n, n] - matrix[n, j]
            if slack < -tolerance:
                violations.append(Violation("IC", (n + 1, j + 1), float(slack)))

    return FeasibilityReport(ir_satisfied=ir_satisfied, ic_matrix=matrix, violations=violations)


def optimal_rewards(bandwidths: Sequence[float], spectrum: TypeSpectrum) -> List[float]:
    """Least rewards that make a monotone allocation IR and IC.

    R_1 = b_1^2 / theta_1 (type-1 IR binds) and
    R_n = R_{n-1} + (b_n^2 - b_{n-1}^2) / theta_n (every downward IC binds).
    """
    b = [float(x) for x in bandwidths]
    if len(b) != spectrum.size:
        raise ValueError(f"got {len(b)} bandwidths for {spectrum.size} types")
    if any(hi < lo for lo, hi in zip(b, b[1:])):
        raise ValueError(f"bandwidths must be non-decreasing in type order, got {b}")

    thetas = [t.theta for t in spectrum.types]
    rewards = [b[0] ** 2 / thetas[0]]
    for n in range(1, len(b)):
        rewards.append(rewards[-1] + (b[n] ** 2 - b[n - 1] ** 2) / thetas[n])
    return rewards


def surplus_matrix(
    points: np.ndarray,
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
    cost_coefficients: np.ndarray,
) -> np.ndarray:
    """N x P matrix of Q_n * S(b) - c_n * b^2 over the grid points, per unit of M.

    Columns whose AoMT exceeds K hold -inf.
    """
    points = np.asarray(points, dtype=float)
    satisfaction, admissible = satisfaction_profile(points, scenario)
    s = np.where(admissible, satisfaction, 0.0)
    q = spectrum.probabilities[:, None]
    c = np.asarray(cost_coefficients, dtype=float)[:, None]
    surplus = q * s[None, :] - c * points[None, :] ** 2
    surplus[:, ~admissible] = -np.inf
    return surplus


def objective_profile(points: np.ndarray, spectrum: TypeSpectrum, scenario: ScenarioParams) -> np.ndarray:
    """per_type_objective for every type (rows) at every grid point (columns)."""
    return spectrum.population * surplus_matrix(points, spectrum, scenario, e_coefficients(spectrum))


def per_type_objective(
    bandwidth_hz: float,
    type_index: int,
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
) -> float:
    """MSP objective M * (Q_n * S(b) - e_n * b^2) for type ``type_index`` (1-based).

    Returns -inf when AoMT(b) exceeds K.
    """
    if not 1 <= type_index <= spectrum.size:
        raise ValueError(f"type_index must lie in 1..{spectrum.size}, got {type_index}")
    row = objective_profile(np.array([bandwidth_hz], dtype=float), spectrum, scenario)[type_index - 1]
    return float(row[0])


def grid_argmax(values: np.ndarray, points: np.ndarray) -> float:
    """Grid point with the largest value; ties go to the smallest bandwidth."""
    values = np.asarray(values, dtype=float)
    index = int(np.argmax(values))
    if not np.isfinite(values[index]):
        raise NoAdmissibleBandwidthError("no grid point keeps the AoMT within the tolerance K")
    return float(points[index])


def grid_argmax_rows(surplus: np.ndarray, points: np.ndarray) -> List[float]:
    """grid_argmax applied to every row of an N x P objective matrix."""
    return [grid_argmax(row, points) for row in surplus]


def grid_search_bandwidth(grid: GridSpec, spectrum: TypeSpectrum, scenario: ScenarioParams) -> List[float]:
    """Per-type grid maximiser of per_type_objective, types treated independently.

    The result need not be monotone in the type order.

    Raises:
        NoAdmissibleBandwidthError: no grid point keeps AoMT <= K
    """
    points = grid.points()
    # M scales every row and cannot move an argmax; scan the unscaled surplus.
    return grid_argmax_rows(surplus_matrix(points, spectrum, scenario, e_coefficients(spectrum)), points)


def iron(
    raw: Sequence[float],
    objective: np.ndarray,
    points: np.ndarray,
) -> Tuple[List[float], List[Tuple[int, int]]]:
    """Pool adjacent violators until the allocation is non-decreasing.

    Each bunch shares one bandwidth: the grid maximiser of the bunch's summed
    objective rows.

    Args:
        raw: Per-type bandwidths, usually the per-type grid maximisers
        objective: N x P matrix of per-type objective values on ``points``
        points: Grid points matching the matrix columns

    Returns:
        (monotone bandwidths, bunches as 1-based inclusive (first, last) type ranges)
    """
    if len(raw) != objective.shape[0]:
        raise ValueError(f"got {len(raw)} bandwidths for {objective.shape[0]} objective rows")

    # [first, last, shared bandwidth], 0-based inclusive
    blocks: List[list] = [[n, n, float(b)] for n, b in enumerate(raw)]
    while True:
        violation: Optional[int] = next(
            (i for i in range(len(blocks) - 1) if blocks[i][2] > blocks[i + 1][2]),
            None,
        )
        if violation is None:
            break
        first, last = blocks[violation][0], blocks[violation + 1][1]
        shared = grid_argmax(objective[first:last + 1].sum(axis=0), points)
        blocks[violation:violation + 2] = [[first, last, shared]]

    ironed = [value for first, last, value in blocks for _ in range(first, last + 1)]
    bunches = [(first + 1, last + 1) for first, last, _ in blocks if last > first]
    return ironed, bunches


def bunching_and_ironing(
    raw: Sequence[float],
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
    grid: GridSpec,
) -> List[float]:
    """Make per-type maximisers monotone by bunching, using per_type_objective."""
    if len(raw) != spectrum.size:
        raise ValueError(f"got {len(raw)} bandwidths for {spectrum.size} types")
    points = grid.points()
    ironed, _ = iron(raw, surplus_matrix(points, spectrum, scenario, e_coefficients(spectrum)), points)
    return ironed


def build_outcome(
    mechanism: str,
    contract: Contract,
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
    raw_bandwidths: Sequence[float],
    bunches: Sequence[Tuple[int, int]] = (),
) -> ContractOutcome:
    """Evaluate a priced contract into a ContractOutcome."""
    utilities = mrp_utilities(contract, spectrum)
    return ContractOutcome(
        mechanism=mechanism,
        contract=contract,
        msp_utility=msp_expected_utility(contract, spectrum, scenario),
        mrp_utilities=utilities,
        mrp_sum_utility=mrp_sum_utility(contract, spectrum),
        welfare=social_welfare(contract.bandwidths, spectrum, scenario),
        raw_bandwidths=[float(b) for b in raw_bandwidths],
        bunches=list(bunches),
    )


def design_contract(grid: GridSpec, spectrum: TypeSpectrum, scenario: ScenarioParams) -> ContractOutcome:
    """Optimal contract under information asymmetry.

    Grid search per type, ironing when the maximisers are not monotone, then
    least IC/IR rewards. The scan is linear in the grid size, so the cost is
    O(N * (b_max - b_min) / step) objective evaluations.

    Raises:
        NoAdmissibleBandwidthError: no grid point keeps AoMT <= K
    """
    points = grid.points()
    surplus = surplus_matrix(points, spectrum, scenario, e_coefficients(spectrum))
    raw = grid_argmax_rows(surplus, points)
    bandwidths, bunches = iron(raw, surplus, points)
    if bunches:
        logger.info(json.dumps({"event": "ironing_applied", "mechanism": "asymmetric", "bunches": bunches}))

    contract = Contract.from_vectors(bandwidths, optimal_rewards(bandwidths, spectrum))
    outcome = build_outcome("asymmetric", contract, spectrum, scenario, raw, bunches)
    logger.info(json.dumps({
        "event": "contract_designed",
        "mechanism": "asymmetric",
        "types": spectrum.size,
        "grid_points": int(points.size),
        "data_bits": scenario.task.data_bits,
        "bandwidths": contract.bandwidths,
        "msp_utility": outcome.msp_utility,
    }))
    return outcome

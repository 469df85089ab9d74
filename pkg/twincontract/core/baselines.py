"""Comparison mechanisms: complete information and social-welfare maximisation.

Both scan the same grid with the same admissibility rule as the
asymmetric-information solver, so the three mechanisms compare like for like.
"""

import json
import logging

import numpy as np

from twincontract.core.contract import (
    ContractOutcome,
    GridSpec,
    build_outcome,
    grid_argmax_rows,
    iron,
    optimal_rewards,
    surplus_matrix,
)
from twincontract.core.economics import Contract, ScenarioParams, TypeSpectrum

logger = logging.getLogger("twincontract.baselines")


def _welfare_costs(spectrum: TypeSpectrum) -> np.ndarray:
    # Same expression as the last e_n coefficient, so type N sees identical objectives.
    return spectrum.probabilities * (1.0 / spectrum.thetas)


def _log_outcome(outcome: ContractOutcome) -> None:
    logger.info(json.dumps({
        "event": "baseline_computed",
        "mechanism": outcome.mechanism,
        "bandwidths": outcome.contract.bandwidths,
        "msp_utility": outcome.msp_utility,
        "mrp_sum_utility": outcome.mrp_sum_utility,
        "welfare": outcome.welfare,
    }))


def complete_info_contract(grid: GridSpec, spectrum: TypeSpectrum, scenario: ScenarioParams) -> ContractOutcome:
    """Contract of an MSP that observes every MRP's type.

    Each type gets the grid maximiser of Q_n * M * (S(b) - b^2 / theta_n) and a
    reward equal to its cost, leaving every MRP with zero surplus.

    Raises:
        NoAdmissibleBandwidthError: no grid point keeps AoMT <= K
    """
    points = grid.points()
    bandwidths = grid_argmax_rows(surplus_matrix(points, spectrum, scenario, _welfare_costs(spectrum)), points)
    # b ** 2 / theta is the exact expression mrp_utility subtracts
    rewards = [b ** 2 / t.theta for b, t in zip(bandwidths, spectrum.types)]
    contract = Contract.from_vectors(bandwidths, rewards)
    outcome = build_outcome("complete-info", contract, spectrum, scenario, bandwidths)
    _log_outcome(outcome)
    return outcome


def social_welfare_contract(grid: GridSpec, spectrum: TypeSpectrum, scenario: ScenarioParams) -> ContractOutcome:
    """Welfare-maximising allocation priced with the least IC/IR rewards.

    Per-type welfare maximisers are already monotone for a sorted spectrum;
    ironing runs anyway and logs when it had to merge types.

    Raises:
        NoAdmissibleBandwidthError: no grid point keeps AoMT <= K
    """
    points = grid.points()
    welfare = surplus_matrix(points, spectrum, scenario, _welfare_costs(spectrum))
    raw = grid_argmax_rows(welfare, points)
    bandwidths, bunches = iron(raw, welfare, points)
    if bunches:
        logger.warning(json.dumps({"event": "ironing_applied", "mechanism": "social-welfare", "bunches": bunches}))

    contract = Contract.from_vectors(bandwidths, optimal_rewards(bandwidths, spectrum))
    outcome = build_outcome("social-welfare", contract, spectrum, scenario, raw, bunches)
    _log_outcome(outcome)
    return outcome

"""Agent model: MRP types and utilities, MSP satisfaction and expected utility.

The MSP never sees an individual MRP's type; it reasons over the type
spectrum (sorted type values theta_n with probabilities Q_n) and a
population of M MRPs. M scales every utility but never moves an argmax.
"""

import math
from dataclasses import dataclass, replace
from typing import Iterator, List, Sequence, Tuple, overload

import numpy as np

from twincontract.core.channel import ChannelParams, MigrationTask, aomt
from twincontract.core.errors import InfeasibleBandwidthError

PROBABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MrpType:
    """One MRP type.

    Attributes:
        theta: Type value G^2 / a (higher = better channel or cheaper bandwidth)
        probability: Probability Q_n that an MRP belongs to this type
    """
    theta: float
    probability: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {self.probability}")


@dataclass(frozen=True)
class TypeSpectrum:
    """Sorted MRP types with their probabilities, plus the population size M.

    Attributes:
        types: MRP types ordered by non-decreasing theta
        population: Number of MRPs M
    """
    types: Tuple[MrpType, ...]
    population: int = 10

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        if not self.types:
            raise ValueError("type spectrum must contain at least one type")
        if self.population < 1:
            raise ValueError(f"population must be at least 1, got {self.population}")
        thetas = [t.theta for t in self.types]
        if any(lo > hi for lo, hi in zip(thetas, thetas[1:])):
            raise ValueError(f"types must be sorted by non-decreasing theta, got {thetas}")
        total = math.fsum(t.probability for t in self.types)
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError(f"sum of type probabilities must equal 1 (sum Q_n = 1), got {total!r}")

    @classmethod
    def from_lists(
        cls,
        thetas: Sequence[float],
        probabilities: Sequence[float],
        population: int = 10,
    ) -> "TypeSpectrum":
        if len(thetas) != len(probabilities):
            raise ValueError(f"got {len(thetas)} thetas but {len(probabilities)} probabilities")
        return cls(
            types=tuple(MrpType(float(t), float(q)) for t, q in zip(thetas, probabilities)),
            population=population,
        )

    @classmethod
    def uniform(cls, thetas: Sequence[float], population: int = 10) -> "TypeSpectrum":
        """Spectrum with Q_n = 1/N for every type."""
        n = len(thetas)
        return cls.from_lists(thetas, [1.0 / n] * n, population)

    @property
    def size(self) -> int:
        return len(self.types)

    @property
    def thetas(self) -> np.ndarray:
        return np.array([t.theta for t in self.types], dtype=float)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([t.probability for t in self.types], dtype=float)

    def with_population(self, population: int) -> "TypeSpectrum":
        return replace(self, population=population)


@dataclass(frozen=True)
class ScenarioParams:
    """Economic and task parameters of one contract-design problem.

    Attributes:
        task: Migration task (D, T, K)
        channel: Radio parameters
        beta: Unit profit for MSP satisfaction. Scenario files require beta > 0;
            beta = 0 is accepted and leaves the solver a cost-only objective.
    """
    task: MigrationTask
    channel: ChannelParams
    beta: float = 200.0

    def __post_init__(self):
        if self.beta < 0 or not math.isfinite(self.beta):
            raise ValueError(f"beta must be a non-negative finite number, got {self.beta}")

    def with_data_bits(self, data_bits: float) -> "ScenarioParams":
        return replace(self, task=self.task.with_data_bits(data_bits))


@dataclass(frozen=True)
class ContractItem:
    """One bandwidth-reward pair of the contract menu.

    Attributes:
        bandwidth_hz: Bandwidth b_n contributed by the MRP (Hz)
        reward: Reward R_n paid by the MSP
    """
    bandwidth_hz: float
    reward: float

    def __post_init__(self):
        if not self.bandwidth_hz >= 0:
            raise ValueError(f"bandwidth_hz must be non-negative, got {self.bandwidth_hz}")
        if not self.reward >= 0:
            raise ValueError(f"reward must be non-negative, got {self.reward}")


@dataclass(frozen=True)
class Contract:
    """Contract menu: one item per type, in type order."""
    items: Tuple[ContractItem, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))

    @classmethod
    def from_vectors(cls, bandwidths: Sequence[float], rewards: Sequence[float]) -> "Contract":
        if len(bandwidths) != len(rewards):
            raise ValueError(f"got {len(bandwidths)} bandwidths but {len(rewards)} rewards")
        return cls(tuple(ContractItem(float(b), float(r)) for b, r in zip(bandwidths, rewards)))

    @property
    def bandwidths(self) -> List[float]:
        return [item.bandwidth_hz for item in self.items]

    @property
    def rewards(self) -> List[float]:
        return [item.reward for item in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self) -> Iterator[ContractItem]:
        return iter(self.items)

    @overload
    def __getitem__(self, index: int) -> ContractItem: ...

    @overload
    def __getitem__(self, index: slice) -> Tuple[ContractItem, ...]: ...

    def __getitem__(self, index):
        return self.items[index]


def mrp_type_from_profile(gain: float, cost_coeff: float, gain_scale: float = 1.0) -> float:
    """Type value theta = (gain * gain_scale)^2 / a.

    Args:
        gain: Channel power gain G between MSP and MRP
        cost_coeff: Unit bandwidth cost coefficient a
        gain_scale: Normalisation applied to the gain before squaring. Physical
            gains (~1e-6) with bandwidth in Hz make the cost term dwarf the
            satisfaction; scenarios pick a scale that lands optima inside the grid.
    """
    if gain <= 0:
        raise ValueError(f"gain must be positive, got {gain}")
    if cost_coeff <= 0:
        raise ValueError(f"cost_coeff must be positive, got {cost_coeff}")
    if gain_scale <= 0:
        raise ValueError(f"gain_scale must be positive, got {gain_scale}")
    return (gain * gain_scale) ** 2 / cost_coeff


def mrp_utility(item: ContractItem, theta: float) -> float:
    """Utility R - b^2 / theta of a type-theta MRP signing ``item``."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    return item.reward - item.bandwidth_hz ** 2 / theta


def satisfaction_profile(
    bandwidths: np.ndarray,
    scenario: ScenarioParams,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised MSP satisfaction over an array of bandwidths.

    Returns:
        (values, admissible) where admissible marks AoMT(b) <= K and values
        holds beta * ln(K - AoMT(b) + 1), or -inf where inadmissible.
    """
    b = np.asarray(bandwidths, dtype=float)
    ages = np.asarray(aomt(b, scenario.task, scenario.channel), dtype=float)
    slack = scenario.task.max_aomt_s - ages
    admissible = slack >= 0
    values = np.full(b.shape, -np.inf)
    values[admissible] = scenario.beta * np.log(slack[admissible] + 1.0)
    return values, admissible


def msp_satisfaction(bandwidth_hz: float, scenario: ScenarioParams) -> float:
    """Satisfaction beta * ln(K - AoMT(b) + 1) the MSP draws from one MRP.

    Raises:
        InfeasibleBandwidthError: AoMT(b) exceeds the tolerance K
    """
    age = float(aomt(bandwidth_hz, scenario.task, scenario.channel))
    if age > scenario.task.max_aomt_s:
        raise InfeasibleBandwidthError(bandwidth_hz, age, scenario.task.max_aomt_s)
    return scenario.beta * math.log(scenario.task.max_aomt_s - age + 1.0)


def _check_length(contract: Sequence[ContractItem], spectrum: TypeSpectrum) -> None:
    if len(contract) != spectrum.size:
        raise ValueError(f"contract has {len(contract)} items but the spectrum has {spectrum.size} types")


def msp_expected_utility(
    contract: Sequence[ContractItem],
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
) -> float:
    """Expected MSP utility sum_n M * Q_n * (S_n - R_n)."""
    _check_length(contract, spectrum)
    m = spectrum.population
    return math.fsum(
        m * t.probability * (msp_satisfaction(item.bandwidth_hz, scenario) - item.reward)
        for item, t in zip(contract, spectrum.types)
    )


def mrp_utilities(contract: Sequence[ContractItem], spectrum: TypeSpectrum) -> List[float]:
    """Own-item utility of every type."""
    _check_length(contract, spectrum)
    return [mrp_utility(item, t.theta) for item, t in zip(contract, spectrum.types)]


def mrp_sum_utility(contract: Sequence[ContractItem], spectrum: TypeSpectrum) -> float:
    """Population-expected MRP surplus sum_n M * Q_n * (R_n - b_n^2 / theta_n)."""
    m = spectrum.population
    return math.fsum(
        m * t.probability * u for u, t in zip(mrp_utilities(contract, spectrum), spectrum.types)
    )


def social_welfare(
    bandwidths: Sequence[float],
    spectrum: TypeSpectrum,
    scenario: ScenarioParams,
) -> float:
    """Welfare sum_n M * Q_n * (S_n - b_n^2 / theta_n); transfers cancel out."""
    if len(bandwidths) != spectrum.size:
        raise ValueError(f"got {len(bandwidths)} bandwidths for {spectrum.size} types")
    m = spectrum.population
    return math.fsum(
        m * t.probability * (msp_satisfaction(b, scenario) - b ** 2 / t.theta)
        for b, t in zip(bandwidths, spectrum.types)
    )


def e_coefficients(spectrum: TypeSpectrum) -> np.ndarray:
    """Cost coefficients e_n of the reformulated MSP objective.

    e_n = Q_n/theta_n + (1/theta_n - 1/theta_{n+1}) * sum_{j>n} Q_j for n < N,
    e_N = Q_N/theta_N. TypeSpectrum guarantees the ascending theta order the
    formula relies on.
    """
    theta = spectrum.thetas
    q = spectrum.probabilities
    inv = 1.0 / theta
    # tail[n] = sum_{j>n} Q_j
    tail = np.concatenate([np.cumsum(q[::-1])[::-1][1:], [0.0]])
    gap = np.concatenate([inv[:-1] - inv[1:], [0.0]])
    return q * inv + gap * tail

"""Contract-design engine: channel model, agent economics, solver and baselines."""

from twincontract.core.baselines import complete_info_contract, social_welfare_contract
from twincontract.core.channel import ChannelParams, MigrationTask, aomt, transmission_rate
from twincontract.core.contract import (
    ContractOutcome,
    FeasibilityReport,
    GridSpec,
    Violation,
    bunching_and_ironing,
    check_feasibility,
    design_contract,
    grid_search_bandwidth,
    optimal_rewards,
    per_type_objective,
)
from twincontract.core.economics import (
    Contract,
    ContractItem,
    MrpType,
    ScenarioParams,
    TypeSpectrum,
    mrp_utility,
    msp_expected_utility,
)
from twincontract.core.errors import (
    InfeasibleBandwidthError,
    NoAdmissibleBandwidthError,
    ScenarioError,
    TwinContractError,
)

__all__ = [
    "ChannelParams",
    "MigrationTask",
    "aomt",
    "transmission_rate",
    "MrpType",
    "TypeSpectrum",
    "ScenarioParams",
    "ContractItem",
    "Contract",
    "mrp_utility",
    "msp_expected_utility",
    "GridSpec",
    "FeasibilityReport",
    "Violation",
    "ContractOutcome",
    "check_feasibility",
    "optimal_rewards",
    "per_type_objective",
    "grid_search_bandwidth",
    "bunching_and_ironing",
    "design_contract",
    "complete_info_contract",
    "social_welfare_contract",
    "TwinContractError",
    "InfeasibleBandwidthError",
    "NoAdmissibleBandwidthError",
    "ScenarioError",
]

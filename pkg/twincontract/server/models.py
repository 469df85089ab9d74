"""Pydantic models for the contract-design REST API.

Request bodies embed a full scenario using the same schema as the TOML files.
When the scenario is omitted the server's default scenario is used.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, NonNegativeFloat

from twincontract.experiments.scenario import ScenarioFile

Mechanism = Literal["asymmetric", "complete-info", "social-welfare"]


# ── Requests ──────────────────────────────────────────────────────────────────

class DesignRequest(BaseModel):
    """Design one mechanism's contract.

    Attributes:
        scenario: Scenario to solve; the server default when omitted
        mechanism: Contract mechanism
        data_size_mb: Overrides the scenario's task data size
    """
    scenario: Optional[ScenarioFile] = None
    mechanism: Mechanism = "asymmetric"
    data_size_mb: Optional[NonNegativeFloat] = None


class FeasibilityRequest(BaseModel):
    scenario: Optional[ScenarioFile] = None
    data_size_mb: Optional[NonNegativeFloat] = None


class SweepRequest(BaseModel):
    """Data-size sweep; ``data_sizes_mb`` overrides the scenario's sweep section."""
    scenario: Optional[ScenarioFile] = None
    mechanisms: List[Mechanism] = Field(
        default_factory=lambda: ["asymmetric", "complete-info", "social-welfare"],
        min_length=1,
    )
    data_sizes_mb: Optional[List[NonNegativeFloat]] = Field(None, min_length=1)


# ── Responses ─────────────────────────────────────────────────────────────────

class ContractItemOut(BaseModel):
    type_index: int
    theta: float
    probability: float
    bandwidth_hz: float
    reward: float
    mrp_utility: float


class DesignResponse(BaseModel):
    scenario_digest: str
    mechanism: Mechanism
    data_bits: float
    items: List[ContractItemOut]
    msp_utility: float
    mrp_sum_utility: float
    welfare: float
    raw_bandwidths: List[float]
    bunches: List[List[int]]


class FeasibilityResponse(BaseModel):
    """utilities[n][j]: utility of type n+1 choosing item j+1."""
    scenario_digest: str
    utilities: List[List[float]]
    ir_satisfied: List[bool]
    ic_satisfied: List[bool]
    feasible: bool


class SweepRowOut(BaseModel):
    mechanism: Mechanism
    data_bits: float
    bandwidths: List[float]
    rewards: List[float]
    msp_utility: Optional[float]
    mrp_sum_utility: Optional[float]
    status: str


class SweepResponse(BaseModel):
    scenario_digest: str
    rows: List[SweepRowOut]

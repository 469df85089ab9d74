"""Scenario files: TOML schema, validation and resolution into domain objects.

A scenario file holds five sections (see ``data/default.toml``):

    [channel]    transmit_power_dbm, unit_gain, distance_m, path_loss_exponent, noise_density_dbm_hz
    [task]       data_size_mb, fixed_time_s, max_aomt_s
    [economics]  beta, population, probabilities, and exactly one type generator:
                 thetas | theta_base (+ types) | cost_coefficients (+ gain_scale)
    [grid]       b_min, b_max, step
    [sweep]      data_sizes_mb

Unknown keys are rejected. Sizes are given in megabytes (1 MB = 8e6 bits).
"""

import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveFloat, ValidationError, model_validator

from twincontract.core.channel import ChannelParams, MigrationTask
from twincontract.core.contract import GridSpec
from twincontract.core.economics import (
    PROBABILITY_TOLERANCE,
    ScenarioParams,
    TypeSpectrum,
    mrp_type_from_profile,
)
from twincontract.core.errors import ScenarioError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger("twincontract.experiments")

BITS_PER_MB = 8e6

_DATA_DIR = Path(__file__).parent.parent / "data"
DEFAULT_SCENARIO_PATH = _DATA_DIR / "default.toml"

_SECTION_CONFIG = ConfigDict(extra="forbid", allow_inf_nan=False)


# ── Schema ────────────────────────────────────────────────────────────────────

class ChannelSection(BaseModel):
    model_config = _SECTION_CONFIG

    transmit_power_dbm: float = 23.0
    unit_gain: PositiveFloat = 1.0
    distance_m: PositiveFloat = 500.0
    path_loss_exponent: NonNegativeFloat = 2.0
    noise_density_dbm_hz: float = -174.0

    def to_params(self) -> ChannelParams:
        return ChannelParams(
            transmit_power_dbm=self.transmit_power_dbm,
            unit_gain=self.unit_gain,
            distance_m=self.distance_m,
            path_loss_exponent=self.path_loss_exponent,
            noise_density_dbm_hz=self.noise_density_dbm_hz,
        )


class TaskSection(BaseModel):
    model_config = _SECTION_CONFIG

    data_size_mb: NonNegativeFloat = 100.0
    fixed_time_s: PositiveFloat = 5.0
    max_aomt_s: PositiveFloat = 50.0

    @model_validator(mode="after")
    def _tolerance_above_fixed_time(self) -> "TaskSection":
        if self.max_aomt_s <= self.fixed_time_s:
            raise ValueError(f"max_aomt_s ({self.max_aomt_s}) must exceed fixed_time_s ({self.fixed_time_s})")
        return self


class EconomicsSection(BaseModel):
    """Economic parameters and the MRP type spectrum.

    Attributes:
        beta: Unit profit for satisfaction (> 0)
        population: Number of MRPs M
        types: Number of types N; required with theta_base, checked otherwise
        thetas: Explicit ascending type values
        theta_base: theta_n = theta_base * n for n = 1..N
        cost_coefficients: Unit bandwidth costs a_n; theta_n = (G * gain_scale)^2 / a_n
        gain_scale: Gain normalisation used with cost_coefficients
        probabilities: Q_n per type, or "uniform"
    """
    model_config = _SECTION_CONFIG

    beta: PositiveFloat = 200.0
    population: int = Field(10, ge=1)
    types: Optional[int] = Field(None, ge=1)
    thetas: Optional[List[PositiveFloat]] = None
    theta_base: Optional[PositiveFloat] = None
    cost_coefficients: Optional[List[PositiveFloat]] = None
    gain_scale: PositiveFloat = 1.0
    probabilities: Union[Literal["uniform"], List[NonNegativeFloat]] = "uniform"

    @model_validator(mode="after")
    def _check_generators(self) -> "EconomicsSection":
        given = [name for name in ("thetas", "theta_base", "cost_coefficients") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(
                f"exactly one of thetas, theta_base or cost_coefficients is required, got {given or 'none'}"
            )
        if self.theta_base is not None and self.types is None:
            raise ValueError("theta_base needs types (the number of MRP types N)")

        n = self.type_count
        if n < 1:
            raise ValueError("at least one MRP type is required")
        if self.types is not None and self.types != n:
            raise ValueError(f"types = {self.types} but {n} type values were given")
        if self.thetas is not None and any(lo > hi for lo, hi in zip(self.thetas, self.thetas[1:])):
            raise ValueError(f"thetas must be sorted ascending, got {self.thetas}")

        if self.probabilities != "uniform":
            if len(self.probabilities) != n:
                raise ValueError(f"got {len(self.probabilities)} probabilities for {n} types")
            total = math.fsum(self.probabilities)
            if abs(total - 1.0) > PROBABILITY_TOLERANCE:
                raise ValueError(f"sum of type probabilities must equal 1 (sum Q_n = 1), got {total!r}")
        return self

    @property
    def type_count(self) -> int:
        if self.thetas is not None:
            return len(self.thetas)
        if self.cost_coefficients is not None:
            return len(self.cost_coefficients)
        return self.types or 0

    def build_spectrum(self, gain: float) -> TypeSpectrum:
        """Resolve the generator into a sorted TypeSpectrum."""
        n = self.type_count
        probabilities = [1.0 / n] * n if self.probabilities == "uniform" else list(self.probabilities)
        if self.thetas is not None:
            thetas = list(self.thetas)
        elif self.theta_base is not None:
            thetas = [self.theta_base * k for k in range(1, n + 1)]
        else:
            thetas = [mrp_type_from_profile(gain, a, self.gain_scale) for a in self.cost_coefficients]
            # probabilities follow their cost coefficient through the sort
            order = sorted(range(n), key=thetas.__getitem__)
            thetas = [thetas[i] for i in order]
            probabilities = [probabilities[i] for i in order]
        return TypeSpectrum.from_lists(thetas, probabilities, self.population)


class GridSection(BaseModel):
    model_config = _SECTION_CONFIG

    b_min: PositiveFloat = 1e5
    b_max: PositiveFloat = 4e7
    step: PositiveFloat = 1e4

    @model_validator(mode="after")
    def _valid_grid(self) -> "GridSection":
        self.to_spec()
        return self

    def to_spec(self) -> GridSpec:
        return GridSpec(b_min=self.b_min, b_max=self.b_max, step=self.step)


def _default_sweep() -> List[float]:
    return [100.0, 120.0, 140.0, 160.0, 180.0, 200.0]


class SweepSection(BaseModel):
    model_config = _SECTION_CONFIG

    data_sizes_mb: List[NonNegativeFloat] = Field(default_factory=_default_sweep, min_length=1)


class ScenarioFile(BaseModel):
    """Validated contents of a scenario file."""
    model_config = _SECTION_CONFIG

    name: str = "scenario"
    description: str = ""
    channel: ChannelSection = Field(default_factory=ChannelSection)
    task: TaskSection = Field(default_factory=TaskSection)
    economics: EconomicsSection
    grid: GridSection = Field(default_factory=GridSection)
    sweep: SweepSection = Field(default_factory=SweepSection)

    @model_validator(mode="after")
    def _channel_is_physical(self) -> "ScenarioFile":
        self.channel.to_params()
        return self

    def digest(self) -> str:
        """Short sha256 of the canonical validated scenario."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def resolve(self) -> "Scenario":
        channel = self.channel.to_params()
        task = MigrationTask(
            data_bits=self.task.data_size_mb * BITS_PER_MB,
            fixed_time_s=self.task.fixed_time_s,
            max_aomt_s=self.task.max_aomt_s,
        )
        return Scenario(
            name=self.name,
            params=ScenarioParams(task=task, channel=channel, beta=self.economics.beta),
            spectrum=self.economics.build_spectrum(channel.gain),
            grid=self.grid.to_spec(),
            sweep_data_bits=tuple(mb * BITS_PER_MB for mb in self.sweep.data_sizes_mb),
            digest=self.digest(),
            source=self,
        )


# ── Resolved scenario ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Scenario:
    """A scenario file resolved into domain objects (linear units throughout).

    Attributes:
        name: Scenario name
        params: Task, channel and beta at the file's data size
        spectrum: Sorted MRP types, probabilities and population
        grid: Bandwidth search grid
        sweep_data_bits: Data sizes D (bits) of the data-size sweep
        digest: Short hash identifying the scenario in sweep output
        source: The validated file the scenario was built from
    """
    name: str
    params: ScenarioParams
    spectrum: TypeSpectrum
    grid: GridSpec
    sweep_data_bits: Tuple[float, ...]
    digest: str
    source: ScenarioFile = field(compare=False, repr=False)

    def with_data_bits(self, data_bits: float) -> ScenarioParams:
        return self.params.with_data_bits(data_bits)


# ── Loading ───────────────────────────────────────────────────────────────────

def _validation_error(exc: ValidationError) -> ScenarioError:
    errors = exc.errors()
    first = errors[0]
    location = ".".join(str(part) for part in first["loc"]) or "scenario"
    message = first["msg"]
    if len(errors) > 1:
        message += f" (and {len(errors) - 1} more)"
    return ScenarioError(message, field=location)


def parse_scenario(data: Dict[str, Any]) -> Scenario:
    """Validate a decoded scenario mapping and resolve it.

    Raises:
        ScenarioError: a field is missing, unknown or out of range
    """
    try:
        source = ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise _validation_error(exc) from exc
    try:
        return source.resolve()
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Load a TOML (or JSON) scenario file.

    Raises:
        ScenarioError: the file cannot be read, parsed or validated
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file ({exc.strerror or exc})", field=str(path)) from exc

    try:
        data = json.loads(text) if path.suffix == ".json" else tomllib.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot parse scenario file: {exc}", field=str(path)) from exc

    scenario = parse_scenario(data)
    logger.info(json.dumps({
        "event": "scenario_loaded",
        "path": str(path),
        "name": scenario.name,
        "digest": scenario.digest,
        "types": scenario.spectrum.size,
        "grid_points": scenario.grid.size,
    }))
    return scenario


_default: Optional[Scenario] = None


def load_default_scenario() -> Scenario:
    """The shipped default scenario, parsed once and cached."""
    global _default
    if _default is None:
        _default = load_scenario(DEFAULT_SCENARIO_PATH)
    return _default

"""twincontract - incentive contracts for vehicle-twin migration bandwidth."""

__version__ = "0.1.0"

from twincontract.core import Contract, GridSpec, ScenarioParams, TypeSpectrum, design_contract

__all__ = ["Contract", "GridSpec", "ScenarioParams", "TypeSpectrum", "design_contract", "__version__"]

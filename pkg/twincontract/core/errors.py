"""Exception hierarchy for twincontract."""


class TwinContractError(Exception):
    """Base class for all twincontract errors."""


class InfeasibleBandwidthError(TwinContractError, ValueError):
    """Raised when a bandwidth yields an AoMT above the tolerance K."""

    def __init__(self, bandwidth_hz: float, aomt_s: float, max_aomt_s: float):
        self.bandwidth_hz = bandwidth_hz
        self.aomt_s = aomt_s
        self.max_aomt_s = max_aomt_s
        super().__init__(
            f"bandwidth {bandwidth_hz:.6g} Hz gives AoMT {aomt_s:.6g} s above tolerance {max_aomt_s:.6g} s"
        )


class NoAdmissibleBandwidthError(TwinContractError, ValueError):
    """Raised when no grid point keeps the AoMT within tolerance."""


class ScenarioError(TwinContractError, ValueError):
    """Raised when a scenario file cannot be parsed or fails validation."""

    def __init__(self, message: str, field: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)

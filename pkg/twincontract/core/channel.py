"""Physical-layer model: channel gain, achievable rate and AoMT of a migration task.

Every function here is pure. Bandwidth arguments accept a float or a numpy
array; arrays come back as arrays, scalars come back as floats.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Union

import numpy as np

BandwidthLike = Union[float, np.ndarray]


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power (or power density) from dBm to watts."""
    if not math.isfinite(p_dbm):
        raise ValueError(f"power must be finite, got {p_dbm!r} dBm")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Radio parameters of the MSP-to-MRP link.

    Decibel inputs are converted to linear units once, here; all downstream
    computation reads the linear attributes.

    Attributes:
        transmit_power_dbm: Transmit power of the MSP (dBm)
        unit_gain: Unit channel power gain h0 (linear, dimensionless)
        distance_m: Distance between MSP and MRP (meters)
        path_loss_exponent: Path-loss coefficient alpha
        noise_density_dbm_hz: Noise power spectral density (dBm/Hz)
        transmit_power_w: Derived transmit power (W)
        noise_density_w_hz: Derived noise density (W/Hz)
        gain: Derived channel power gain G = h0 * d^-alpha
    """
    transmit_power_dbm: float = 23.0
    unit_gain: float = 1.0
    distance_m: float = 500.0
    path_loss_exponent: float = 2.0
    noise_density_dbm_hz: float = -174.0
    transmit_power_w: float = field(init=False, repr=False)
    noise_density_w_hz: float = field(init=False, repr=False)
    gain: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.unit_gain <= 0:
            raise ValueError(f"unit_gain must be positive, got {self.unit_gain}")
        if self.distance_m <= 0:
            raise ValueError(f"distance_m must be positive, got {self.distance_m}")
        if self.path_loss_exponent < 0:
            raise ValueError(f"path_loss_exponent must be non-negative, got {self.path_loss_exponent}")

        power_w = dbm_to_watts(self.transmit_power_dbm)
        noise_w = dbm_to_watts(self.noise_density_dbm_hz)
        if power_w <= 0:
            raise ValueError("transmit power must be positive in watts")
        if noise_w <= 0:
            raise ValueError("noise density must be positive in W/Hz")

        object.__setattr__(self, "transmit_power_w", power_w)
        object.__setattr__(self, "noise_density_w_hz", noise_w)
        object.__setattr__(self, "gain", channel_gain(self))

    @property
    def received_power_w(self) -> float:
        """rho_s * G, the numerator of the SNR."""
        return self.transmit_power_w * self.gain


@dataclass(frozen=True)
class MigrationTask:
    """One avatar migration task.

    Attributes:
        data_bits: Avatar data size D (bits)
        fixed_time_s: Collection plus processing time T (seconds)
        max_aomt_s: Maximum tolerated AoMT K (seconds)
    """
    data_bits: float
    fixed_time_s: float = 5.0
    max_aomt_s: float = 50.0

    def __post_init__(self):
        if self.data_bits < 0:
            raise ValueError(f"data_bits must be non-negative, got {self.data_bits}")
        if self.fixed_time_s <= 0:
            raise ValueError(f"fixed_time_s must be positive, got {self.fixed_time_s}")
        if self.max_aomt_s <= self.fixed_time_s:
            raise ValueError(
                f"max_aomt_s ({self.max_aomt_s}) must exceed fixed_time_s ({self.fixed_time_s})"
            )

    def with_data_bits(self, data_bits: float) -> "MigrationTask":
        return replace(self, data_bits=data_bits)


def _as_output(values: np.ndarray) -> BandwidthLike:
    return float(values) if values.ndim == 0 else values


def _as_bandwidth(bandwidth_hz: BandwidthLike) -> np.ndarray:
    b = np.asarray(bandwidth_hz, dtype=float)
    if not np.all(b > 0):
        raise ValueError("bandwidth must be positive; the rate is undefined at zero bandwidth")
    return b


def channel_gain(params: ChannelParams) -> float:
    """Channel power gain G = h0 * d^-alpha."""
    if params.distance_m <= 0:
        raise ValueError(f"distance_m must be positive, got {params.distance_m}")
    return params.unit_gain * params.distance_m ** (-params.path_loss_exponent)


def shannon_rate(
    bandwidth_hz: BandwidthLike,
    received_power_w: float,
    noise_density_w_hz: float,
) -> BandwidthLike:
    """Achievable rate b * log2(1 + P / (N0 * b)) in bits per second.

    Args:
        bandwidth_hz: Allocated bandwidth, scalar or array (Hz, > 0)
        received_power_w: Received signal power rho_s * G (W, >= 0)
        noise_density_w_hz: Noise power spectral density N0 (W/Hz, > 0)
    """
    b = _as_bandwidth(bandwidth_hz)
    if received_power_w < 0:
        raise ValueError(f"received power must be non-negative, got {received_power_w}")
    if noise_density_w_hz <= 0:
        raise ValueError(f"noise density must be positive, got {noise_density_w_hz}")
    return _as_output(b * np.log2(1.0 + received_power_w / (noise_density_w_hz * b)))


def transmission_rate(bandwidth_hz: BandwidthLike, params: ChannelParams) -> BandwidthLike:
    """Achievable MSP-to-MRP rate for the given bandwidth (bits per second)."""
    return shannon_rate(bandwidth_hz, params.received_power_w, params.noise_density_w_hz)


def capacity_ceiling(params: ChannelParams) -> float:
    """Infinite-bandwidth limit of the rate, rho_s * G / (N0 * ln 2)."""
    return params.received_power_w / (params.noise_density_w_hz * math.log(2.0))


def aomt(bandwidth_hz: BandwidthLike, task: MigrationTask, params: ChannelParams) -> BandwidthLike:
    """Age of migration task D / rate(b) + T (seconds)."""
    rate = np.asarray(transmission_rate(bandwidth_hz, params), dtype=float)
    return _as_output(task.data_bits / rate + task.fixed_time_s)

"""OFDM grid parameters, noise model, uncertainty classes and CNR mappings.

Frequency responses enter only as per-subcarrier squared magnitudes. The
uncertainty classes are componentwise intervals on those squared magnitudes;
the Gaussian bound generators work on magnitudes and square the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DimensionError, DomainError

__all__ = [
    "OfdmParams",
    "NoiseModel",
    "UncertaintyClass",
    "ResponsePoint",
    "CnrProfile",
    "BoundFamily",
    "REFERENCE_PARAMS",
    "cnr_from_response",
    "noise_from_snr",
    "gaussian_bounds",
    "bound_magnitudes",
    "is_member",
]

# floor applied to lower magnitudes in the fixed-upper family
LOWER_MAGNITUDE_FLOOR = 1e-3

BOUND_FAMILIES = ("baseline", "fixed_lower", "fixed_upper")


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionError(f"{name} must be a nonempty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OfdmParams:
    """Waveform grid of a pulsed OFDM waveform with ``n_symbols`` symbols."""

    n_subcarriers: int
    subcarrier_spacing: float
    guard_interval: float
    n_symbols: int
    carrier_frequency: float = 0.0

    def __post_init__(self):
        if int(self.n_subcarriers) != self.n_subcarriers or self.n_subcarriers < 1:
            raise DomainError("n_subcarriers must be a positive integer")
        if int(self.n_symbols) != self.n_symbols or self.n_symbols < 1:
            raise DomainError("n_symbols must be a positive integer")
        if not self.subcarrier_spacing > 0:
            raise DomainError("subcarrier_spacing must be positive")
        if not self.guard_interval >= 0:
            raise DomainError("guard_interval must be nonnegative")
        object.__setattr__(self, "n_subcarriers", int(self.n_subcarriers))
        object.__setattr__(self, "n_symbols", int(self.n_symbols))

    @property
    def elementary_duration(self) -> float:
        return 1.0 / self.subcarrier_spacing

    @property
    def symbol_duration(self) -> float:
        return 1.0 / self.subcarrier_spacing + self.guard_interval

    @property
    def pulse_duration(self) -> float:
        return self.n_symbols * self.symbol_duration

    @property
    def subcarrier_frequencies(self) -> np.ndarray:
        """Absolute subcarrier frequencies ``f_c + m * spacing``."""
        return self.carrier_frequency + self.subcarrier_spacing * np.arange(self.n_subcarriers)

    def with_subcarriers(self, n_subcarriers: int) -> "OfdmParams":
        return OfdmParams(
            n_subcarriers,
            self.subcarrier_spacing,
            self.guard_interval,
            self.n_symbols,
            self.carrier_frequency,
        )


# 128 subcarriers, 0.25 MHz spacing, 1 us guard interval, 16 symbols
REFERENCE_PARAMS = OfdmParams(
    n_subcarriers=128,
    subcarrier_spacing=0.25e6,
    guard_interval=1e-6,
    n_symbols=16,
)


@dataclass(frozen=True)
class NoiseModel:
    """Radar noise PSD per subcarrier (W/Hz) and communications noise power (W)."""

    radar_noise_psd: np.ndarray
    comm_noise_power: float

    def __post_init__(self):
        psd = _as_vector(self.radar_noise_psd, "radar_noise_psd")
        if np.any(psd <= 0):
            raise DomainError("radar noise PSD entries must be positive")
        if not self.comm_noise_power > 0:
            raise DomainError("comm_noise_power must be positive")
        object.__setattr__(self, "radar_noise_psd", psd)
        object.__setattr__(self, "comm_noise_power", float(self.comm_noise_power))

    @classmethod
    def flat(cls, n_subcarriers: int, psd: float, comm_noise_power: float) -> "NoiseModel":
        return cls(np.full(n_subcarriers, float(psd)), comm_noise_power)


def noise_from_snr(params: OfdmParams, snr_db: float) -> NoiseModel:
    """Noise model for a scalar SNR knob with unit transmit power.

    The noise power is ``sigma2 = 10**(-snr_db/10)``; the communications noise
    power is ``sigma2`` and the radar PSD is flat at ``sigma2 / spacing``.
    """
    sigma2 = 10.0 ** (-float(snr_db) / 10.0)
    return NoiseModel.flat(params.n_subcarriers, sigma2 / params.subcarrier_spacing, sigma2)


@dataclass(frozen=True)
class ResponsePoint:
    """Squared-magnitude radar (target x channel) and communications responses."""

    radar_response: np.ndarray
    comm_response: np.ndarray

    def __post_init__(self):
        radar = _as_vector(self.radar_response, "radar_response")
        comm = _as_vector(self.comm_response, "comm_response")
        if radar.size != comm.size:
            raise DimensionError("radar and comm responses differ in length")
        object.__setattr__(self, "radar_response", radar)
        object.__setattr__(self, "comm_response", comm)

    def __len__(self) -> int:
        return self.radar_response.size


@dataclass(frozen=True)
class UncertaintyClass:
    """Componentwise interval bounds on the two squared-magnitude responses."""

    radar_lower: np.ndarray
    radar_upper: np.ndarray
    comm_lower: np.ndarray
    comm_upper: np.ndarray

    def __post_init__(self):
        vectors = {}
        for name in ("radar_lower", "radar_upper", "comm_lower", "comm_upper"):
            vectors[name] = _as_vector(getattr(self, name), name)
            object.__setattr__(self, name, vectors[name])
        sizes = {v.size for v in vectors.values()}
        if len(sizes) != 1:
            raise DimensionError("uncertainty class bounds differ in length")
        if np.any(self.radar_lower <= 0) or np.any(self.comm_lower <= 0):
            raise DomainError("lower bounds must be strictly positive")
        if np.any(self.radar_lower > self.radar_upper) or np.any(self.comm_lower > self.comm_upper):
            raise DomainError("lower bounds must not exceed upper bounds")

    def __len__(self) -> int:
        return self.radar_lower.size

    @classmethod
    def degenerate(cls, point: ResponsePoint) -> "UncertaintyClass":
        """Single-point class ``l = u = point``."""
        return cls(point.radar_response, point.radar_response, point.comm_response, point.comm_response)

    @property
    def lower(self) -> ResponsePoint:
        return ResponsePoint(self.radar_lower, self.comm_lower)

    @property
    def upper(self) -> ResponsePoint:
        return ResponsePoint(self.radar_upper, self.comm_upper)

    @property
    def midpoint(self) -> ResponsePoint:
        return ResponsePoint(
            0.5 * (self.radar_lower + self.radar_upper),
            0.5 * (self.comm_lower + self.comm_upper),
        )

    def sample(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Draw ``n`` points componentwise uniform between the bounds.

        Returns two arrays of shape ``(n, N_c)`` (radar, comm).
        """
        u1 = rng.random((n, len(self)))
        u2 = rng.random((n, len(self)))
        radar = self.radar_lower + u1 * (self.radar_upper - self.radar_lower)
        comm = self.comm_lower + u2 * (self.comm_upper - self.comm_lower)
        return radar, comm

    def subset(self, indices) -> "UncertaintyClass":
        idx = np.asarray(indices)
        return UncertaintyClass(
            self.radar_lower[idx], self.radar_upper[idx], self.comm_lower[idx], self.comm_upper[idx]
        )


def is_member(point: ResponsePoint, uclass: UncertaintyClass, tol: float = 0.0) -> bool:
    """True iff ``l <= rho <= u`` componentwise for both responses."""
    if len(point) != len(uclass):
        raise DimensionError("point and class differ in length")
    return bool(
        np.all(point.radar_response >= uclass.radar_lower - tol)
        and np.all(point.radar_response <= uclass.radar_upper + tol)
        and np.all(point.comm_response >= uclass.comm_lower - tol)
        and np.all(point.comm_response <= uclass.comm_upper + tol)
    )


@dataclass(frozen=True)
class CnrProfile:
    """Per-subcarrier channel-to-noise ratios for radar and communications."""

    radar_cnr: np.ndarray
    comm_cnr: np.ndarray

    def __post_init__(self):
        radar = _as_vector(self.radar_cnr, "radar_cnr")
        comm = _as_vector(self.comm_cnr, "comm_cnr")
        if radar.size != comm.size:
            raise DimensionError("radar and comm CNR vectors differ in length")
        if np.any(radar <= 0) or np.any(comm <= 0):
            raise DomainError("CNR entries must be positive")
        object.__setattr__(self, "radar_cnr", radar)
        object.__setattr__(self, "comm_cnr", comm)

    def __len__(self) -> int:
        return self.radar_cnr.size

    def subset(self, indices) -> "CnrProfile":
        idx = np.asarray(indices)
        return CnrProfile(self.radar_cnr[idx], self.comm_cnr[idx])


def radar_cnr_scale(params: OfdmParams, noise: NoiseModel) -> np.ndarray:
    """Factor mapping a radar squared response to its CNR, per subcarrier."""
    if noise.radar_noise_psd.size != params.n_subcarriers:
        raise DimensionError("noise PSD length does not match the number of subcarriers")
    ts = params.symbol_duration
    return params.n_symbols * ts * ts / (noise.radar_noise_psd * params.pulse_duration)


def cnr_from_response(params: OfdmParams, noise: NoiseModel, point: ResponsePoint) -> CnrProfile:
    """Map squared-magnitude responses to radar and communications CNRs.

    ``nu_m = N_s * T_s**2 * rho_gh_m / (N(f_m) * T_p)`` and
    ``varpi_m = rho_h_m / sigma_c**2``.
    """
    if len(point) != params.n_subcarriers:
        raise DimensionError(
            f"response has {len(point)} entries, grid has {params.n_subcarriers} subcarriers"
        )
    if np.any(point.radar_response <= 0) or np.any(point.comm_response <= 0):
        raise DomainError("responses must be strictly positive")
    radar = radar_cnr_scale(params, noise) * point.radar_response
    comm = point.comm_response / noise.comm_noise_power
    return CnrProfile(radar, comm)


@dataclass(frozen=True)
class BoundFamily:
    """Selects a published Gaussian bound set.

    ``baseline`` ignores ``width``. ``fixed_lower`` keeps the baseline lower
    magnitudes and sets upper = lower + width. ``fixed_upper`` uses upper
    magnitudes ``5.1 + gaussian`` and lower = max(upper - width, 1e-3).
    """

    name: str = "baseline"
    width: float = 0.0

    def __post_init__(self):
        if self.name not in BOUND_FAMILIES:
            raise DomainError(f"unknown bound family {self.name!r}")
        if not np.isfinite(self.width) or self.width < 0:
            raise DomainError("bound width must be finite and nonnegative")


def _gaussian(n_subcarriers: int, scale: float, shift: float) -> np.ndarray:
    m = np.arange(n_subcarriers, dtype=float)
    x = scale * (m - n_subcarriers / 2 - shift) / n_subcarriers
    return np.exp(-(x**2))


def bound_magnitudes(params: OfdmParams, family: BoundFamily) -> dict[str, np.ndarray]:
    """Magnitude bounds |G_L|, |G_U|, |h_L|, |h_U| before squaring."""
    n = params.n_subcarriers
    g_shape = _gaussian(n, 2.0, 0.0)
    h_shape = _gaussian(n, 3.0, 30.0)
    if family.name == "baseline":
        mags = dict(radar_lower=g_shape, radar_upper=2.0 + g_shape, comm_lower=h_shape, comm_upper=1.5 + h_shape)
    elif family.name == "fixed_lower":
        mags = dict(
            radar_lower=g_shape,
            radar_upper=g_shape + family.width,
            comm_lower=h_shape,
            comm_upper=h_shape + family.width,
        )
    else:
        g_upper = 5.1 + g_shape
        h_upper = 5.1 + h_shape
        mags = dict(
            radar_lower=np.maximum(g_upper - family.width, LOWER_MAGNITUDE_FLOOR),
            radar_upper=g_upper,
            comm_lower=np.maximum(h_upper - family.width, LOWER_MAGNITUDE_FLOOR),
            comm_upper=h_upper,
        )
    if np.any(mags["radar_lower"] <= 0) or np.any(mags["comm_lower"] <= 0):
        raise DomainError("bound family produced nonpositive lower bounds")
    return mags


def gaussian_bounds(params: OfdmParams, family: Optional[BoundFamily] = None) -> UncertaintyClass:
    """Uncertainty class from scaled-Gaussian magnitude bounds (squared)."""
    family = family or BoundFamily()
    mags = bound_magnitudes(params, family)
    return UncertaintyClass(**{k: v**2 for k, v in mags.items()})

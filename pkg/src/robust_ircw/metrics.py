"""Radar conditional MI and communications DIR, plus their weighted combination.

Everything is accumulated with natural logs and converted to bits once.
MI is in bits since ``spacing * T_p`` is dimensionless; DIR is in bits/s.
The normalized joint criterion is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError
from .ofdm_model import CnrProfile, NoiseModel, OfdmParams, UncertaintyClass, cnr_from_response

__all__ = [
    "PowerAllocation",
    "ObjectiveConfig",
    "mutual_information",
    "data_information_rate",
    "joint_criterion",
    "weighted_log_sum",
    "compute_normalizers",
]

LN2 = math.log(2.0)
BUDGET_SLACK = 1e-9


@dataclass(frozen=True)
class PowerAllocation:
    """Nonnegative per-subcarrier powers whose sum does not exceed ``budget``."""

    powers: np.ndarray
    budget: float = 1.0

    def __post_init__(self):
        p = np.array(self.powers, dtype=float, copy=True).reshape(-1)
        if p.size == 0:
            raise DimensionError("allocation must have at least one subcarrier")
        if not self.budget >= 0:
            raise DomainError("budget must be nonnegative")
        if np.any(~np.isfinite(p)) or np.any(p < 0):
            raise DomainError("powers must be finite and nonnegative")
        if p.sum() > self.budget + BUDGET_SLACK:
            raise DomainError(f"powers sum to {p.sum()!r}, above budget {self.budget!r}")
        p.setflags(write=False)
        object.__setattr__(self, "powers", p)
        object.__setattr__(self, "budget", float(self.budget))

    def __len__(self) -> int:
        return self.powers.size

    @classmethod
    def uniform(cls, n_subcarriers: int, budget: float = 1.0) -> "PowerAllocation":
        return cls(np.full(n_subcarriers, budget / n_subcarriers), budget)

    @property
    def total(self) -> float:
        return float(self.powers.sum())


@dataclass(frozen=True)
class ObjectiveConfig:
    """Weights and normalizers of the joint radar/communications criterion.

    ``alpha = w_r * spacing * T_p / (2 ln2 F_r)`` and
    ``beta = w_c * spacing / (ln2 F_c)`` are the per-nat coefficients so that
    the criterion equals ``sum(alpha*ln(1+p*nu) + beta*ln(1+p*varpi))``.
    """

    w_r: float
    w_c: float
    F_r: float
    F_c: float
    subcarrier_spacing: float
    pulse_duration: float

    def __post_init__(self):
        if not (0.0 <= self.w_r <= 1.0 and 0.0 <= self.w_c <= 1.0):
            raise DomainError("weights must lie in [0, 1]")
        if abs(self.w_r + self.w_c - 1.0) > 1e-12:
            raise DomainError("weights must sum to one")
        if not (self.F_r > 0 and self.F_c > 0):
            raise DomainError("normalizers must be positive")
        if not (self.subcarrier_spacing > 0 and self.pulse_duration > 0):
            raise DomainError("spacing and pulse duration must be positive")

    @classmethod
    def from_params(cls, params: OfdmParams, w_c: float, F_r: float, F_c: float) -> "ObjectiveConfig":
        w_c = float(w_c)
        return cls(1.0 - w_c, w_c, float(F_r), float(F_c), params.subcarrier_spacing, params.pulse_duration)

    def with_weight(self, w_c: float) -> "ObjectiveConfig":
        w_c = float(w_c)
        return ObjectiveConfig(1.0 - w_c, w_c, self.F_r, self.F_c, self.subcarrier_spacing, self.pulse_duration)

    @property
    def alpha(self) -> float:
        return self.w_r * self.subcarrier_spacing * self.pulse_duration / (2.0 * LN2 * self.F_r)

    @property
    def beta(self) -> float:
        return self.w_c * self.subcarrier_spacing / (LN2 * self.F_c)


def _check(p: PowerAllocation, cnr: CnrProfile) -> np.ndarray:
    if len(p) != len(cnr):
        raise DimensionError(f"allocation has {len(p)} entries, CNR profile has {len(cnr)}")
    return p.powers


def _powers(p) -> np.ndarray:
    if isinstance(p, PowerAllocation):
        return p.powers
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0):
        raise DomainError("powers must be nonnegative")
    return arr


def mutual_information(params: OfdmParams, p: PowerAllocation, cnr: CnrProfile) -> float:
    """Conditional MI in bits: ``(spacing*T_p/2) * sum(log2(1 + p*nu))``."""
    powers = _check(p, cnr)
    nats = np.sum(np.log1p(powers * cnr.radar_cnr))
    return float(0.5 * params.subcarrier_spacing * params.pulse_duration * nats / LN2)


def data_information_rate(params: OfdmParams, p: PowerAllocation, cnr: CnrProfile) -> float:
    """DIR in bits/s: ``spacing * sum(log2(1 + p*varpi))``."""
    powers = _check(p, cnr)
    nats = np.sum(np.log1p(powers * cnr.comm_cnr))
    return float(params.subcarrier_spacing * nats / LN2)


def joint_criterion(params: OfdmParams, p: PowerAllocation, cnr: CnrProfile, cfg: ObjectiveConfig) -> float:
    """Normalized weighted sum ``(w_r/F_r) MI + (w_c/F_c) DIR``."""
    mi = mutual_information(params, p, cnr)
    rate = data_information_rate(params, p, cnr)
    return cfg.w_r / cfg.F_r * mi + cfg.w_c / cfg.F_c * rate


def weighted_log_sum(p, radar_cnr, comm_cnr, alpha: float, beta: float) -> np.ndarray:
    """``sum(alpha*ln(1+p*nu) + beta*ln(1+p*varpi))`` over the last axis.

    Broadcasts, so a batch of allocations or of CNR vectors can be scored in
    one call. With ``alpha, beta`` from an :class:`ObjectiveConfig` this is
    the joint criterion.
    """
    p = _powers(p)
    nu = np.asarray(radar_cnr, dtype=float)
    varpi = np.asarray(comm_cnr, dtype=float)
    terms = alpha * np.log1p(p * nu) + beta * np.log1p(p * varpi)
    return np.sum(terms, axis=-1)


def compute_normalizers(
    params: OfdmParams, noise: NoiseModel, uclass: UncertaintyClass, budget: float = 1.0
) -> tuple[float, float]:
    """Maximum MI and maximum DIR with the responses at the class upper bounds."""
    from .waterfilling import comm_optimal, radar_optimal

    upper = uclass.upper
    f_r = radar_optimal(params, noise, upper, budget).optimal_value
    f_c = comm_optimal(params, noise, upper, budget).optimal_value
    return f_r, f_c


def upper_cnr(params: OfdmParams, noise: NoiseModel, uclass: UncertaintyClass) -> CnrProfile:
    return cnr_from_response(params, noise, uclass.upper)


def lower_cnr(params: OfdmParams, noise: NoiseModel, uclass: UncertaintyClass) -> CnrProfile:
    return cnr_from_response(params, noise, uclass.lower)

"""Exact water-filling for the single-objective radar and communications problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError
from .metrics import PowerAllocation, data_information_rate, mutual_information
from .ofdm_model import NoiseModel, OfdmParams, ResponsePoint, cnr_from_response

__all__ = ["WaterfillResult", "waterfill", "radar_optimal", "comm_optimal"]


@dataclass(frozen=True)
class WaterfillResult:
    allocation: PowerAllocation
    water_level: float
    active_set: np.ndarray
    optimal_value: float
    degenerate: bool = False

    def kkt_residual(self, cnr_values) -> float:
        """Largest violation of the water-filling optimality conditions."""
        inv = 1.0 / np.asarray(cnr_values, dtype=float)
        p = self.allocation.powers
        active = p > 0
        res = abs(p.sum() - self.allocation.budget)
        if np.any(active):
            res = max(res, float(np.max(np.abs(p[active] - (self.water_level - inv[active])))))
        if np.any(~active):
            res = max(res, float(np.max(np.maximum(self.water_level - inv[~active], 0.0))))
        return res


def waterfill(cnr_values, budget: float = 1.0) -> WaterfillResult:
    """Maximize ``sum(log(1 + p*cnr))`` subject to ``sum(p) <= budget, p >= 0``.

    Finite-step method: subcarriers are sorted by inverse CNR and the largest
    active set whose common water level lies above its worst member is kept.
    ``optimal_value`` is reported in nats; the radar/comm wrappers rescale it.

    Parameters
    ----------
    cnr_values : array_like
        Positive channel-to-noise ratios.
    budget : float
        Total power. ``0`` returns the all-zeros allocation flagged as
        degenerate, with water level ``min(1/cnr)``.
    """
    cnr = np.asarray(cnr_values, dtype=float).reshape(-1)
    if cnr.size == 0:
        raise DimensionError("cnr vector is empty")
    if np.any(~np.isfinite(cnr)) or np.any(cnr <= 0):
        raise DomainError("cnr entries must be finite and positive")
    if not np.isfinite(budget) or budget < 0:
        raise DomainError("budget must be nonnegative")

    inv = 1.0 / cnr
    if budget == 0:
        level = float(inv.min())
        zeros = np.zeros_like(cnr)
        alloc = PowerAllocation(zeros, budget=0.0)
        return WaterfillResult(alloc, level, np.array([], dtype=int), 0.0, degenerate=True)

    order = np.argsort(inv, kind="stable")
    inv_sorted = inv[order]
    k = np.arange(1, cnr.size + 1)
    levels = (budget + np.cumsum(inv_sorted)) / k
    feasible = np.nonzero(levels > inv_sorted)[0]
    n_active = int(feasible[-1]) + 1
    level = float(levels[n_active - 1])

    active = order[:n_active]
    # absorb cumsum rounding into the level so that sum(p) matches the budget
    level += (budget - np.sum(level - inv[active])) / n_active
    powers = np.zeros_like(cnr)
    powers[active] = np.maximum(level - inv[active], 0.0)
    value = float(np.sum(np.log1p(powers * cnr)))
    alloc = PowerAllocation(powers, budget=budget)
    return WaterfillResult(alloc, level, np.sort(active), value)


def _rescaled(result: WaterfillResult, value: float) -> WaterfillResult:
    return WaterfillResult(result.allocation, result.water_level, result.active_set, value, result.degenerate)


def radar_optimal(params: OfdmParams, noise: NoiseModel, point: ResponsePoint, budget: float = 1.0) -> WaterfillResult:
    """MI-maximizing allocation; ``optimal_value`` is the MI in bits."""
    cnr = cnr_from_response(params, noise, point)
    result = waterfill(cnr.radar_cnr, budget)
    return _rescaled(result, mutual_information(params, result.allocation, cnr))


def comm_optimal(params: OfdmParams, noise: NoiseModel, point: ResponsePoint, budget: float = 1.0) -> WaterfillResult:
    """DIR-maximizing allocation; ``optimal_value`` is the DIR in bits/s."""
    cnr = cnr_from_response(params, noise, point)
    result = waterfill(cnr.comm_cnr, budget)
    return _rescaled(result, data_information_rate(params, result.allocation, cnr))

"""Minimax-robust joint allocation and its verifiers.

The worst case over an interval uncertainty class sits at the lower bounds,
so the robust design maximizes the joint criterion at the lower-bound CNRs.
That concave program has a per-subcarrier closed form in the inverse total
power multiplier ``mu'``; ``mu'`` is found by bisection on the power budget.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .exceptions import DimensionError, DomainError, PreconditionError, SolverError
from .metrics import ObjectiveConfig, PowerAllocation, weighted_log_sum
from .ofdm_model import (
    CnrProfile,
    NoiseModel,
    OfdmParams,
    UncertaintyClass,
    cnr_from_response,
    radar_cnr_scale,
)

__all__ = [
    "InverseCnrs",
    "RobustSolution",
    "closed_form_power",
    "solve_robust",
    "solve_robust_cnr",
    "kkt_residual",
    "SaddlePointReport",
    "verify_saddle_point",
    "worst_allocation_condition",
    "WorstAllocationReport",
    "verify_worst_allocation",
    "simplex_grid",
]

log = logging.getLogger(__name__)

BUDGET_TOL = 1e-10
MAX_BISECTIONS = 200
SADDLE_SLACK = 1e-9
WORST_ALLOCATION_SLACK = 1e-12


@dataclass(frozen=True)
class InverseCnrs:
    """Reciprocal CNRs ``1/nu`` and ``1/varpi`` (normally at the lower bounds)."""

    radar_inv: np.ndarray
    comm_inv: np.ndarray

    def __post_init__(self):
        radar = np.asarray(self.radar_inv, dtype=float).reshape(-1)
        comm = np.asarray(self.comm_inv, dtype=float).reshape(-1)
        if radar.size == 0 or radar.size != comm.size:
            raise DimensionError("inverse CNR vectors must be nonempty and of equal length")
        for v in (radar, comm):
            if np.any(~np.isfinite(v)) or np.any(v <= 0):
                raise DomainError("inverse CNRs must be finite and positive")
        object.__setattr__(self, "radar_inv", radar)
        object.__setattr__(self, "comm_inv", comm)

    @classmethod
    def from_cnr(cls, cnr: CnrProfile) -> "InverseCnrs":
        return cls(1.0 / cnr.radar_cnr, 1.0 / cnr.comm_cnr)

    def to_cnr(self) -> CnrProfile:
        return CnrProfile(1.0 / self.radar_inv, 1.0 / self.comm_inv)

    def __len__(self) -> int:
        return self.radar_inv.size


@dataclass(frozen=True)
class RobustSolution:
    allocation: PowerAllocation
    multiplier: float
    worst_case_value: float
    kkt_residual: float
    iterations: int = 0


def _closed_form(mu_prime: float, nu_inv: np.ndarray, w_inv: np.ndarray, a: float, b: float) -> np.ndarray:
    # positive root of p^2 - A p + c = 0, c = nu'*w' - mu'(a*w' + b*nu')
    A = mu_prime * (a + b) - (nu_inv + w_inv)
    D = (w_inv - nu_inv) + mu_prime * (a - b)
    root = np.sqrt(D * D + 4.0 * mu_prime * mu_prime * a * b)
    c = nu_inv * w_inv - mu_prime * (a * w_inv + b * nu_inv)
    with np.errstate(divide="ignore", invalid="ignore"):
        # for A < 0 the textbook form cancels; use the product-of-roots form
        small = np.where(root - A > 0, -2.0 * c / (root - A), 0.0)
    p = np.where(A >= 0, 0.5 * (A + root), small)
    return np.maximum(p, 0.0)


def closed_form_power(mu_prime: float, inv: InverseCnrs, cfg: ObjectiveConfig) -> np.ndarray:
    """Per-subcarrier robust power for a given inverse multiplier ``mu'``.

    The result is not normalized to the budget; it is nondecreasing and
    continuous in ``mu'``.
    """
    if not mu_prime > 0:
        raise DomainError("mu' must be positive")
    return _closed_form(float(mu_prime), inv.radar_inv, inv.comm_inv, cfg.alpha, cfg.beta)


def _marginal(p: np.ndarray, inv: InverseCnrs, cfg: ObjectiveConfig) -> np.ndarray:
    return cfg.alpha / (inv.radar_inv + p) + cfg.beta / (inv.comm_inv + p)


def kkt_residual(solution, inv: InverseCnrs, cfg: ObjectiveConfig, budget: float = 1.0) -> float:
    """Largest violation of the KKT conditions of the lower-bound problem.

    Stationarity on active subcarriers and dual feasibility on inactive ones
    are measured relative to ``mu = 1/mu'``; the budget term is absolute.
    """
    p = solution.allocation.powers
    if p.size != len(inv):
        raise DimensionError("allocation and inverse CNRs differ in length")
    mu = 1.0 / solution.multiplier
    g = _marginal(p, inv, cfg)
    active = p > 0
    res = abs(float(p.sum()) - budget)
    if np.any(active):
        res = max(res, float(np.max(np.abs(mu - g[active]))) / mu)
    if np.any(~active):
        res = max(res, float(np.max(np.maximum(g[~active] - mu, 0.0))) / mu)
    return res


def solve_robust_cnr(lower: CnrProfile, cfg: ObjectiveConfig, budget: float = 1.0) -> RobustSolution:
    """Maximize the joint criterion at the given (lower-bound) CNRs."""
    if not budget > 0:
        raise DomainError("budget must be positive")
    inv = InverseCnrs.from_cnr(lower)
    a, b = cfg.alpha, cfg.beta
    if not a + b > 0:
        raise DomainError("alpha + beta must be positive")

    def total(mu_prime: float) -> float:
        return float(_closed_form(mu_prime, inv.radar_inv, inv.comm_inv, a, b).sum())

    lo = 0.0
    hi = 1.0 / np.min(a / (inv.radar_inv + 1.0) + b / (inv.comm_inv + 1.0))
    while total(hi) < budget:
        lo, hi = hi, 2.0 * hi

    mid = hi
    for it in range(1, MAX_BISECTIONS + 1):
        mid = 0.5 * (lo + hi)
        s = total(mid)
        if abs(s - budget) <= BUDGET_TOL:
            break
        if s > budget:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 4 * np.spacing(hi):
            # bracket at float resolution; keep whichever end is closer
            mid = min((lo, hi), key=lambda m: abs(total(m) - budget))
            break
    else:
        raise SolverError(f"bisection did not converge in {MAX_BISECTIONS} iterations")

    p = _closed_form(mid, inv.radar_inv, inv.comm_inv, a, b)
    if abs(p.sum() - budget) > BUDGET_TOL:
        raise SolverError(f"budget mismatch {abs(p.sum() - budget):.3e} after bisection")
    alloc = PowerAllocation(p, budget=budget)
    value = float(weighted_log_sum(alloc.powers, lower.radar_cnr, lower.comm_cnr, a, b))
    sol = RobustSolution(alloc, float(mid), value, 0.0, it)
    sol = RobustSolution(alloc, float(mid), value, kkt_residual(sol, inv, cfg, budget), it)
    log.debug("robust solve: mu'=%.6g after %d bisections, residual %.2e", mid, it, sol.kkt_residual)
    return sol


def solve_robust(
    params: OfdmParams,
    noise: NoiseModel,
    uclass: UncertaintyClass,
    cfg: ObjectiveConfig,
    budget: float = 1.0,
) -> RobustSolution:
    """Minimax-robust allocation over ``uclass``.

    For a degenerate class (``l = u``) this is the design for that single
    response, which is how the non-robust baseline is produced.
    """
    return solve_robust_cnr(cnr_from_response(params, noise, uclass.lower), cfg, budget)


@dataclass(frozen=True)
class SaddlePointReport:
    n_response_samples: int
    n_allocation_samples: int
    response_margin: float
    allocation_margin: float
    response_violations: int
    allocation_violations: int
    slack: float = SADDLE_SLACK

    @property
    def passed(self) -> bool:
        return self.response_violations == 0 and self.allocation_violations == 0

    def to_dict(self) -> dict:
        return {
            "n_response_samples": self.n_response_samples,
            "n_allocation_samples": self.n_allocation_samples,
            "response_margin": self.response_margin,
            "allocation_margin": self.allocation_margin,
            "response_violations": self.response_violations,
            "allocation_violations": self.allocation_violations,
            "passed": self.passed,
        }


def verify_saddle_point(
    params: OfdmParams,
    noise: NoiseModel,
    uclass: UncertaintyClass,
    cfg: ObjectiveConfig,
    solution: RobustSolution,
    n_samples: int = 100,
    seed: int = 0,
    n_allocation_samples: int | None = None,
) -> SaddlePointReport:
    """Check both saddle-point inequalities on random samples.

    (a) no response in the class does worse for ``p_s`` than the lower bounds;
    (b) no feasible allocation does better at the lower bounds than ``p_s``.
    Margins are the minimum of (sampled - reference) for (a) and
    (reference - sampled) for (b); negative beyond the slack is a violation.
    """
    n_alloc = n_samples if n_allocation_samples is None else n_allocation_samples
    rng = np.random.default_rng(seed)
    a, b = cfg.alpha, cfg.beta
    p_s = solution.allocation.powers
    budget = solution.allocation.budget
    scale = radar_cnr_scale(params, noise)
    sigma_c2 = noise.comm_noise_power
    nu_l = scale * uclass.radar_lower
    w_l = uclass.comm_lower / sigma_c2
    at_lower = float(weighted_log_sum(p_s, nu_l, w_l, a, b))

    radar, comm = uclass.sample(rng, n_samples)
    sampled = weighted_log_sum(p_s, scale * radar, comm / sigma_c2, a, b)
    resp_gap = sampled - at_lower

    allocs = budget * rng.dirichlet(np.ones(len(uclass)), size=n_alloc)
    alloc_gap = at_lower - weighted_log_sum(allocs, nu_l, w_l, a, b)

    return SaddlePointReport(
        n_response_samples=n_samples,
        n_allocation_samples=n_alloc,
        response_margin=float(resp_gap.min()) if n_samples else 0.0,
        allocation_margin=float(alloc_gap.min()) if n_alloc else 0.0,
        response_violations=int(np.sum(resp_gap < -SADDLE_SLACK)),
        allocation_violations=int(np.sum(alloc_gap < -SADDLE_SLACK)),
    )


def worst_allocation_condition(inv_at_point: InverseCnrs, cfg: ObjectiveConfig, m1: int) -> bool:
    """Whether putting the whole unit budget on ``m1`` is the joint optimum.

    Compares the largest zero-power marginal gain among the other subcarriers
    with the marginal gain of ``m1`` at full power.
    """
    n = len(inv_at_point)
    if not 0 <= m1 < n:
        raise DimensionError(f"subcarrier index {m1} out of range for {n} subcarriers")
    a, b = cfg.alpha, cfg.beta
    nu_inv, w_inv = inv_at_point.radar_inv, inv_at_point.comm_inv
    others = np.delete(np.arange(n), m1)
    if others.size == 0:
        return True
    left = np.max(a / nu_inv[others] + b / w_inv[others])
    right = a / (1.0 + nu_inv[m1]) + b / (1.0 + w_inv[m1])
    return bool(left <= right)


def simplex_grid(n: int, divisions: int, chunk: int = 1 << 18) -> Iterator[np.ndarray]:
    """Yield integer compositions of ``divisions`` into ``n`` parts, in chunks.

    Each yielded array has shape ``(k, n)`` and rows summing to ``divisions``.
    """
    if n < 1 or divisions < 0:
        raise DomainError("need n >= 1 and divisions >= 0")
    if n == 1:
        yield np.array([[divisions]])
        return

    buf: list[np.ndarray] = []
    size = 0

    def prefixes(depth: int, remaining: int, prefix: tuple):
        if depth == n - 2:
            yield prefix, remaining
            return
        for k in range(remaining + 1):
            yield from prefixes(depth + 1, remaining - k, prefix + (k,))

    for prefix, remaining in prefixes(0, divisions, ()):
        i = np.arange(remaining + 1)
        rows = np.empty((remaining + 1, n), dtype=np.int64)
        rows[:, : n - 2] = prefix
        rows[:, n - 2] = i
        rows[:, n - 1] = remaining - i
        buf.append(rows)
        size += rows.shape[0]
        if size >= chunk:
            yield np.concatenate(buf)
            buf, size = [], 0
    if buf:
        yield np.concatenate(buf)


@dataclass(frozen=True)
class WorstAllocationReport:
    minimizer: int
    worst_value: float
    n_grid_points: int
    min_gap: float
    violations: int
    slack: float = WORST_ALLOCATION_SLACK
    argmin_grid_point: np.ndarray = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "minimizer": self.minimizer,
            "worst_value": self.worst_value,
            "n_grid_points": self.n_grid_points,
            "min_gap": self.min_gap,
            "violations": self.violations,
            "passed": self.passed,
        }


def verify_worst_allocation(
    cnr: CnrProfile, cfg: ObjectiveConfig, grid_step: float, budget: float = 1.0
) -> WorstAllocationReport:
    """Brute-force check that concentrating the budget on the joint CNR minimizer is worst.

    Every allocation on the full-budget simplex grid with spacing
    ``grid_step * budget`` must score at least as much as the concentrated one.
    """
    n = len(cnr)
    if n > 4:
        raise PreconditionError("grid enumeration is limited to at most 4 subcarriers")
    if not 0 < grid_step <= 1:
        raise DomainError("grid_step must lie in (0, 1]")
    nu, w = cnr.radar_cnr, cnr.comm_cnr
    joint = np.nonzero((nu == nu.min()) & (w == w.min()))[0]
    if joint.size == 0:
        raise PreconditionError("no subcarrier minimizes both CNRs")
    m1 = int(joint[0])
    a, b = cfg.alpha, cfg.beta
    p_min = np.zeros(n)
    p_min[m1] = budget
    worst = float(weighted_log_sum(p_min, nu, w, a, b))

    divisions = int(round(1.0 / grid_step))
    count, violations, min_gap, arg = 0, 0, np.inf, None
    for k in simplex_grid(n, divisions):
        p = budget * k / divisions
        gap = weighted_log_sum(p, nu, w, a, b) - worst
        count += gap.size
        violations += int(np.sum(gap < -WORST_ALLOCATION_SLACK))
        j = int(np.argmin(gap))
        if gap[j] < min_gap:
            min_gap, arg = float(gap[j]), p[j]
    return WorstAllocationReport(m1, worst, count, min_gap, violations, argmin_grid_point=arg)

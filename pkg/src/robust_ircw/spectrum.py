"""Pulse spectrum synthesis and checks on the ``U(f_m) ~ T_s^2 N_s |a_m|^2`` approximation.

The pulse holds ``N_s`` OFDM symbols of duration ``T_s = 1/spacing + T_g``,
each a sum of subcarriers weighted by ``a_m`` and modulated by unit-modulus
codes ``c[m, n]``. The spectrum is evaluated by direct summation, which is
exact at arbitrary frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError
from .ofdm_model import OfdmParams

__all__ = [
    "WaveformSpec",
    "random_codes",
    "spectrum",
    "expected_power_spectrum",
    "cross_term_fraction",
    "monte_carlo_power_spectrum",
    "approximation_report",
    "baseband_signal",
    "measure_papr",
]


@dataclass(frozen=True)
class WaveformSpec:
    params: OfdmParams
    weights: np.ndarray
    code_matrix: np.ndarray
    budget: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.weights, dtype=complex).reshape(-1)
        c = np.asarray(self.code_matrix, dtype=complex)
        shape = (self.params.n_subcarriers, self.params.n_symbols)
        if a.size != shape[0]:
            raise DimensionError("one weight per subcarrier is required")
        if c.shape != shape:
            raise DimensionError(f"code matrix must have shape {shape}")
        if not np.allclose(np.abs(c), 1.0, rtol=0, atol=1e-12):
            raise DomainError("codes must have unit modulus")
        if np.sum(np.abs(a) ** 2) > self.budget + 1e-9:
            raise DomainError("sum of |a_m|^2 exceeds the budget")
        object.__setattr__(self, "weights", a)
        object.__setattr__(self, "code_matrix", c)

    @classmethod
    def from_powers(cls, params: OfdmParams, powers, codes=None, budget: float = 1.0) -> "WaveformSpec":
        a = np.sqrt(np.asarray(powers, dtype=float))
        if codes is None:
            codes = np.ones((params.n_subcarriers, params.n_symbols), dtype=complex)
        return cls(params, a, codes, budget)


def random_codes(params: OfdmParams, rng: np.random.Generator, ensemble: str = "uniform", size=None) -> np.ndarray:
    """Independent zero-mean unit-modulus codes.

    ``ensemble`` is ``"uniform"`` (continuous phase) or ``"qpsk"``. With
    ``size`` the result has a leading batch dimension.
    """
    shape = (params.n_subcarriers, params.n_symbols)
    if size is not None:
        shape = (size,) + shape
    if ensemble == "uniform":
        phase = rng.uniform(0.0, 2.0 * np.pi, shape)
    elif ensemble == "qpsk":
        phase = 0.5 * np.pi * rng.integers(0, 4, shape) + 0.25 * np.pi
    else:
        raise DomainError(f"unknown code ensemble {ensemble!r}")
    return np.exp(1j * phase)


def _sinc(x: np.ndarray) -> np.ndarray:
    # sin(x)/x, with numpy's sinc being sin(pi x)/(pi x)
    return np.sinc(x / np.pi)


def _kernels(params: OfdmParams, weights: np.ndarray, f: np.ndarray):
    ts = params.symbol_duration
    df = params.subcarrier_spacing
    m = np.arange(params.n_subcarriers)
    n = np.arange(params.n_symbols)
    offset = f[:, None] - params.subcarrier_frequencies[None, :]
    # (F, N_c): a_m * exp(-j pi m df Ts) * sinc(pi (f - f_m) Ts)
    sub = weights[None, :] * np.exp(-1j * np.pi * m * df * ts)[None, :] * _sinc(np.pi * offset * ts)
    # (F, N_s): exp(-j 2 pi (f - f_c)(n Ts - Ts/2))
    sym = np.exp(-2j * np.pi * (f[:, None] - params.carrier_frequency) * (n[None, :] * ts - 0.5 * ts))
    return sub, sym


def spectrum(spec: WaveformSpec, f) -> np.ndarray:
    """Complex pulse spectrum ``S(f)`` at absolute frequencies ``f``."""
    f_arr = np.asarray(f, dtype=float).reshape(-1)
    sub, sym = _kernels(spec.params, spec.weights, f_arr)
    out = spec.params.symbol_duration * np.sum((sub @ spec.code_matrix) * sym, axis=1)
    return out[0] if np.ndim(f) == 0 else out.reshape(np.shape(f))


def expected_power_spectrum(weights, params: OfdmParams, f) -> np.ndarray:
    """Code-averaged ``E[|S(f)|^2] = T_s^2 N_s sum |a_m|^2 sinc^2(pi (f - f_m) T_s)``."""
    p = np.abs(np.asarray(weights)) ** 2
    f_arr = np.asarray(f, dtype=float).reshape(-1)
    ts = params.symbol_duration
    offset = f_arr[:, None] - params.subcarrier_frequencies[None, :]
    out = ts * ts * params.n_symbols * (_sinc(np.pi * offset * ts) ** 2 @ p)
    return out[0] if np.ndim(f) == 0 else out.reshape(np.shape(f))


def cross_term_fraction(weights, params: OfdmParams) -> np.ndarray:
    """Leakage from the other subcarriers into ``f_m``, relative to ``p_m``.

    ``sum_{m' != m} p_m' sinc^2(pi (m - m') spacing T_s) / p_m`` per subcarrier;
    ``inf`` where ``p_m = 0`` and other subcarriers leak.
    """
    p = np.abs(np.asarray(weights)) ** 2
    m = np.arange(params.n_subcarriers)
    k = m[:, None] - m[None, :]
    leak = _sinc(np.pi * k * params.subcarrier_spacing * params.symbol_duration) ** 2
    np.fill_diagonal(leak, 0.0)
    cross = leak @ p
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, cross / np.where(p > 0, p, 1.0), np.where(cross > 0, np.inf, 0.0))


def approximation_report(weights, params: OfdmParams) -> np.ndarray:
    """Relative error of ``T_s^2 N_s p_m`` against the exact expectation at ``f_m``.

    Only subcarriers with ``p_m > 0`` are reported; the others are ``nan``.
    """
    p = np.abs(np.asarray(weights)) ** 2
    active = p > 0
    if not np.any(active):
        raise DomainError("at least one subcarrier needs positive power")
    ts = params.symbol_duration
    approx = ts * ts * params.n_symbols * p
    exact = expected_power_spectrum(weights, params, params.subcarrier_frequencies)
    out = np.full(p.shape, np.nan)
    out[active] = np.abs(exact[active] - approx[active]) / approx[active]
    return out


def monte_carlo_power_spectrum(
    weights,
    params: OfdmParams,
    n_trials: int,
    seed: int = 0,
    ensemble: str = "uniform",
    batch: int = 256,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and standard deviation of ``|S(f_m)|^2`` over random codes.

    Trials are drawn in fixed-size batches from one seeded generator, so the
    result depends only on ``(weights, params, n_trials, seed, ensemble)``.
    """
    if n_trials < 1:
        raise DomainError("n_trials must be at least 1")
    a = np.asarray(weights, dtype=complex).reshape(-1)
    if a.size != params.n_subcarriers:
        raise DimensionError("one weight per subcarrier is required")
    rng = np.random.default_rng(seed)
    f = params.subcarrier_frequencies
    sub, sym = _kernels(params, a, f)
    ts = params.symbol_duration

    total = np.zeros(f.size)
    total_sq = np.zeros(f.size)
    done = 0
    while done < n_trials:
        b = min(batch, n_trials - done)
        codes = random_codes(params, rng, ensemble, size=b)
        s = ts * np.einsum("bfn,fn->bf", sub[None] @ codes, sym)
        u = np.abs(s) ** 2
        total += u.sum(axis=0)
        total_sq += (u * u).sum(axis=0)
        done += b
    mean = total / n_trials
    var = np.maximum(total_sq / n_trials - mean * mean, 0.0)
    if n_trials > 1:
        var *= n_trials / (n_trials - 1)
    return mean, np.sqrt(var)


def baseband_signal(spec: WaveformSpec, oversampling: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Carrier-free pulse sampled at ``dt = T / (oversampling * N_c)``.

    Returns ``(t, s)`` covering ``[0, T_p)``.
    """
    params = spec.params
    dt = params.elementary_duration / (oversampling * params.n_subcarriers)
    t = np.arange(int(np.round(params.pulse_duration / dt))) * dt
    ts = params.symbol_duration
    n_idx = np.minimum((t // ts).astype(int), params.n_symbols - 1)
    tau = t - n_idx * ts
    m = np.arange(params.n_subcarriers)
    carriers = np.exp(2j * np.pi * params.subcarrier_spacing * tau[:, None] * m[None, :])
    coeff = spec.weights[:, None] * spec.code_matrix  # (N_c, N_s)
    s = np.sum(carriers * coeff[:, n_idx].T, axis=1)
    return t, s


def measure_papr(spec: WaveformSpec, oversampling: int = 4) -> float:
    """Peak over mean instantaneous power of the baseband pulse."""
    if oversampling < 4:
        raise DomainError("oversampling must be at least 4")
    _, s = baseband_signal(spec, oversampling)
    power = np.abs(s) ** 2
    mean = power.mean()
    if mean == 0:
        raise DomainError("signal has zero power")
    return float(power.max() / mean)

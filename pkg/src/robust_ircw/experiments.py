"""Scenario-driven sweeps of the robust and non-robust designs, plus the verification suite.

Every runner compares the robust design (optimized at the class lower bounds)
with a non-robust design optimized for one specific response inside the
class, and evaluates both at the two class extremes.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .exceptions import ConfigError, IrcwError
from .metrics import (
    ObjectiveConfig,
    compute_normalizers,
    data_information_rate,
    mutual_information,
    weighted_log_sum,
)
from .ofdm_model import (
    REFERENCE_PARAMS,
    BoundFamily,
    NoiseModel,
    OfdmParams,
    ResponsePoint,
    UncertaintyClass,
    cnr_from_response,
    gaussian_bounds,
    is_member,
    noise_from_snr,
)
from .robust import (
    InverseCnrs,
    RobustSolution,
    kkt_residual,
    solve_robust,
    verify_saddle_point,
    verify_worst_allocation,
)
from .spectrum import approximation_report, monte_carlo_power_spectrum, expected_power_spectrum

__all__ = [
    "Scenario",
    "ExperimentRow",
    "PlanResult",
    "VerificationReport",
    "load_scenario",
    "scenario_from_dict",
    "plan",
    "run_snr_sweep",
    "run_width_sweep",
    "run_tradeoff",
    "run_verifications",
    "spectrum_check",
    "write_rows",
    "rows_as_records",
    "format_csv",
    "width_sweep_anchors",
]

log = logging.getLogger(__name__)

DEFAULT_SNR_SWEEP = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
DEFAULT_WIDTH_SWEEP = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
DEFAULT_WC_SWEEP = tuple(round(0.1 * k, 10) for k in range(11))
SWEEP_AXES = ("snr_db", "width", "w_c")

KKT_LIMIT = 1e-7
BUDGET_LIMIT = 1e-10
APPROX_LIMIT = 0.15


@dataclass(frozen=True)
class Scenario:
    """One experiment configuration.

    ``noise`` is used as given unless ``snr_db`` is set, in which case the
    noise model is derived from the scalar SNR knob. Bounds come either from
    a Gaussian ``family`` or from an explicit ``uclass``.
    """

    ofdm: OfdmParams = REFERENCE_PARAMS
    snr_db: Optional[float] = 5.0
    noise: Optional[NoiseModel] = None
    family: BoundFamily = field(default_factory=BoundFamily)
    uclass: Optional[UncertaintyClass] = None
    w_c: float = 0.5
    budget: float = 1.0
    specific_response: Optional[ResponsePoint] = None
    sweep_axis: Optional[str] = None
    sweep_values: tuple = ()

    def __post_init__(self):
        if self.snr_db is None and self.noise is None:
            raise ConfigError("scenario needs either snr_db or an explicit noise model")
        if not 0.0 <= self.w_c <= 1.0:
            raise ConfigError("w_c must lie in [0, 1]")
        if not self.budget > 0:
            raise ConfigError("budget must be positive")
        if self.uclass is not None and len(self.uclass) != self.ofdm.n_subcarriers:
            raise ConfigError("explicit bounds do not match the number of subcarriers")
        if self.noise is not None and self.noise.radar_noise_psd.size != self.ofdm.n_subcarriers:
            raise ConfigError("noise PSD does not match the number of subcarriers")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ConfigError(f"unknown sweep axis {self.sweep_axis!r}")
            values = tuple(float(v) for v in self.sweep_values)
            if not values:
                raise ConfigError("sweep list is empty")
            if any(b < a for a, b in zip(values, values[1:])):
                raise ConfigError("sweep list must be sorted ascending")
            object.__setattr__(self, "sweep_values", values)
        if self.specific_response is not None:
            if len(self.specific_response) != self.ofdm.n_subcarriers:
                raise ConfigError("specific response does not match the number of subcarriers")
            if self.sweep_axis != "width" and not is_member(self.specific_response, self.uncertainty_class()):
                raise ConfigError("specific response lies outside the uncertainty class")

    def noise_model(self, snr_db: Optional[float] = None) -> NoiseModel:
        snr = self.snr_db if snr_db is None else snr_db
        if snr is None:
            return self.noise
        return noise_from_snr(self.ofdm, snr)

    def uncertainty_class(self, width: Optional[float] = None) -> UncertaintyClass:
        if self.uclass is not None:
            if width is not None:
                raise ConfigError("width sweeps need a Gaussian bound family")
            return self.uclass
        family = self.family if width is None else BoundFamily(self.family.name, width)
        return gaussian_bounds(self.ofdm, family)

    def sweep(self, axis: str, default: Sequence[float]) -> tuple:
        if self.sweep_axis == axis:
            return self.sweep_values
        return tuple(float(v) for v in default)


def _vector_or_scalar(value, n: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ConfigError(f"{name} must be a scalar or a list of {n} values")
    return arr


def scenario_from_dict(data: dict) -> Scenario:
    """Build a scenario from the JSON schema.

    ``{"ofdm": {...}, "noise": {"snr_db" | "radar_psd", "comm_noise_power"},
    "bounds": {"family", "width", explicit vectors}, "w_c", "budget",
    "specific_response": {"radar", "comm"}, "sweep": {axis: [values]}}``
    """
    try:
        o = data.get("ofdm", {})
        params = OfdmParams(
            n_subcarriers=o.get("n_subcarriers", REFERENCE_PARAMS.n_subcarriers),
            subcarrier_spacing=o.get("subcarrier_spacing_hz", REFERENCE_PARAMS.subcarrier_spacing),
            guard_interval=o.get("guard_interval_s", REFERENCE_PARAMS.guard_interval),
            n_symbols=o.get("n_symbols", REFERENCE_PARAMS.n_symbols),
            carrier_frequency=o.get("carrier_frequency_hz", 0.0),
        )
        n = params.n_subcarriers

        nz = data.get("noise", {"snr_db": 5.0})
        snr_db, noise = None, None
        if "snr_db" in nz and "radar_psd" in nz:
            raise ConfigError("noise section takes either snr_db or radar_psd, not both")
        if "snr_db" in nz:
            snr_db = float(nz["snr_db"])
        elif "radar_psd" in nz:
            if "comm_noise_power" not in nz:
                raise ConfigError("explicit noise needs comm_noise_power")
            noise = NoiseModel(_vector_or_scalar(nz["radar_psd"], n, "radar_psd"), nz["comm_noise_power"])
        else:
            raise ConfigError("noise section needs snr_db or radar_psd")

        bd = data.get("bounds", {"family": "baseline"})
        name = bd.get("family", "baseline")
        family, uclass = BoundFamily(), None
        if name == "explicit":
            keys = ("radar_lower", "radar_upper", "comm_lower", "comm_upper")
            missing = [k for k in keys if k not in bd]
            if missing:
                raise ConfigError(f"explicit bounds missing {missing}")
            uclass = UncertaintyClass(*(_vector_or_scalar(bd[k], n, k) for k in keys))
        else:
            family = BoundFamily(name, float(bd.get("width", 0.0)))

        specific = None
        if "specific_response" in data:
            sr = data["specific_response"]
            specific = ResponsePoint(
                _vector_or_scalar(sr["radar"], n, "specific radar"),
                _vector_or_scalar(sr["comm"], n, "specific comm"),
            )

        axis, values = None, ()
        if "sweep" in data:
            sw = data["sweep"]
            if len(sw) != 1:
                raise ConfigError("sweep section must name exactly one axis")
            ((axis, values),) = sw.items()

        return Scenario(
            ofdm=params,
            snr_db=snr_db,
            noise=noise,
            family=family,
            uclass=uclass,
            w_c=float(data.get("w_c", 0.5)),
            budget=float(data.get("budget", 1.0)),
            specific_response=specific,
            sweep_axis=axis,
            sweep_values=tuple(values),
        )
    except ConfigError:
        raise
    except (IrcwError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


@dataclass(frozen=True)
class ExperimentRow:
    sweep_value: float
    dir_robust_lower: float
    dir_robust_upper: float
    dir_nonrobust_lower: float
    dir_nonrobust_upper: float
    mi_robust_lower: float
    mi_robust_upper: float
    mi_nonrobust_lower: float
    mi_nonrobust_upper: float

    def ordering_holds(self, slack: float = 1e-9) -> bool:
        """Every value at the lower bounds is at most its value at the upper bounds."""
        pairs = [
            (self.dir_robust_lower, self.dir_robust_upper),
            (self.dir_nonrobust_lower, self.dir_nonrobust_upper),
            (self.mi_robust_lower, self.mi_robust_upper),
            (self.mi_nonrobust_lower, self.mi_nonrobust_upper),
        ]
        return all(lo <= hi + slack * max(1.0, abs(hi)) for lo, hi in pairs)


@dataclass(frozen=True)
class _Design:
    params: OfdmParams
    noise: NoiseModel
    uclass: UncertaintyClass
    cfg: ObjectiveConfig
    robust: RobustSolution
    nonrobust: RobustSolution
    specific: ResponsePoint


def _design(
    scenario: Scenario,
    noise: NoiseModel,
    uclass: UncertaintyClass,
    w_c: float,
    specific: ResponsePoint,
    normalizers: Optional[tuple[float, float]] = None,
) -> _Design:
    params = scenario.ofdm
    if not is_member(specific, uclass):
        raise ConfigError("specific response lies outside the uncertainty class")
    f_r, f_c = normalizers or compute_normalizers(params, noise, uclass, scenario.budget)
    cfg = ObjectiveConfig.from_params(params, w_c, f_r, f_c)
    robust = solve_robust(params, noise, uclass, cfg, scenario.budget)
    nonrobust = solve_robust(params, noise, UncertaintyClass.degenerate(specific), cfg, scenario.budget)
    return _Design(params, noise, uclass, cfg, robust, nonrobust, specific)


def _row(value: float, d: _Design) -> ExperimentRow:
    lower = cnr_from_response(d.params, d.noise, d.uclass.lower)
    upper = cnr_from_response(d.params, d.noise, d.uclass.upper)
    rob, non = d.robust.allocation, d.nonrobust.allocation
    return ExperimentRow(
        sweep_value=float(value),
        dir_robust_lower=data_information_rate(d.params, rob, lower),
        dir_robust_upper=data_information_rate(d.params, rob, upper),
        dir_nonrobust_lower=data_information_rate(d.params, non, lower),
        dir_nonrobust_upper=data_information_rate(d.params, non, upper),
        mi_robust_lower=mutual_information(d.params, rob, lower),
        mi_robust_upper=mutual_information(d.params, rob, upper),
        mi_nonrobust_lower=mutual_information(d.params, non, lower),
        mi_nonrobust_upper=mutual_information(d.params, non, upper),
    )


def _specific(scenario: Scenario, uclass: UncertaintyClass) -> tuple[ResponsePoint, str]:
    if scenario.specific_response is not None:
        return scenario.specific_response, "scenario"
    return uclass.midpoint, "class midpoint"


def run_snr_sweep(scenario: Scenario, snr_values: Optional[Sequence[float]] = None) -> list[ExperimentRow]:
    """DIR and MI of both designs versus SNR; normalizers follow each SNR."""
    values = tuple(snr_values) if snr_values is not None else scenario.sweep("snr_db", DEFAULT_SNR_SWEEP)
    uclass = scenario.uncertainty_class()
    specific, _ = _specific(scenario, uclass)
    rows = []
    for snr in values:
        d = _design(scenario, scenario.noise_model(snr), uclass, scenario.w_c, specific)
        rows.append(_row(snr, d))
    return rows


def width_sweep_anchors(scenario: Scenario, widths: Sequence[float]) -> tuple[ResponsePoint, tuple[float, float]]:
    """Design response and normalizers held fixed across a width sweep.

    The non-robust design uses the midpoint of the narrowest class, which is
    inside every class of a nested family; the normalizers come from the
    widest class. Holding both fixed means a row only changes through the
    bounds that actually move.
    """
    narrow = scenario.uncertainty_class(min(widths))
    wide = scenario.uncertainty_class(max(widths))
    specific = scenario.specific_response or narrow.midpoint
    norms = compute_normalizers(scenario.ofdm, scenario.noise_model(), wide, scenario.budget)
    return specific, norms


def run_width_sweep(scenario: Scenario, widths: Optional[Sequence[float]] = None) -> list[ExperimentRow]:
    """DIR and MI of both designs versus the width of the uncertainty range."""
    if scenario.uclass is not None or scenario.family.name == "baseline":
        raise ConfigError("width sweeps need the fixed_lower or fixed_upper family")
    values = tuple(widths) if widths is not None else scenario.sweep("width", DEFAULT_WIDTH_SWEEP)
    specific, norms = width_sweep_anchors(scenario, values)
    noise = scenario.noise_model()
    rows = []
    for width in values:
        uclass = scenario.uncertainty_class(width)
        d = _design(scenario, noise, uclass, scenario.w_c, specific, norms)
        rows.append(_row(width, d))
    return rows


def run_tradeoff(scenario: Scenario, wc_values: Optional[Sequence[float]] = None) -> list[ExperimentRow]:
    """MI/DIR trade-off curves as the communications weight goes from 0 to 1."""
    values = tuple(wc_values) if wc_values is not None else scenario.sweep("w_c", DEFAULT_WC_SWEEP)
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise ConfigError("w_c values must lie in [0, 1]")
    noise = scenario.noise_model()
    uclass = scenario.uncertainty_class()
    specific, _ = _specific(scenario, uclass)
    norms = compute_normalizers(scenario.ofdm, noise, uclass, scenario.budget)
    return [_row(wc, _design(scenario, noise, uclass, wc, specific, norms)) for wc in values]


@dataclass(frozen=True)
class PlanResult:
    powers: np.ndarray
    multiplier: float
    worst_case_value: float
    kkt_residual: float
    mi_lower: float
    mi_upper: float
    dir_lower: float
    dir_upper: float
    normalizers: tuple[float, float]


def plan(scenario: Scenario) -> PlanResult:
    """Robust allocation for the scenario's weight, noise and class."""
    noise = scenario.noise_model()
    uclass = scenario.uncertainty_class()
    specific, _ = _specific(scenario, uclass)
    d = _design(scenario, noise, uclass, scenario.w_c, specific)
    row = _row(scenario.w_c, d)
    return PlanResult(
        powers=np.array(d.robust.allocation.powers),
        multiplier=d.robust.multiplier,
        worst_case_value=d.robust.worst_case_value,
        kkt_residual=d.robust.kkt_residual,
        mi_lower=row.mi_robust_lower,
        mi_upper=row.mi_robust_upper,
        dir_lower=row.dir_robust_lower,
        dir_upper=row.dir_robust_upper,
        normalizers=(d.cfg.F_r, d.cfg.F_c),
    )


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name: str, passed: bool, **details) -> None:
        self.checks.append({"name": name, "passed": bool(passed), **details})

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c["name"] for c in self.checks if not c["passed"]]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks}


def _joint_minimizer_subset(lower_nu: np.ndarray, lower_w: np.ndarray, size: int = 3) -> Optional[np.ndarray]:
    m1 = int(np.argmin(lower_nu))
    if lower_w[m1] > lower_w.min():
        return None
    others = np.nonzero((lower_nu >= lower_nu[m1]) & (lower_w >= lower_w[m1]))[0]
    others = others[others != m1]
    if others.size == 0:
        return np.array([m1])
    pick = others[np.linspace(0, others.size - 1, min(size - 1, others.size)).round().astype(int)]
    return np.concatenate(([m1], np.unique(pick)))


def run_verifications(
    scenario: Scenario,
    seed: int = 7,
    n_samples: int = 200,
    solution_hook: Optional[Callable[[RobustSolution], RobustSolution]] = None,
) -> VerificationReport:
    """Run the KKT, saddle-point, bound-ordering, worst-allocation and spectral checks.

    ``solution_hook`` may replace the robust solution before it is checked;
    it exists so that tests can inject a corrupted solution.
    """
    report = VerificationReport()
    params = scenario.ofdm
    noise = scenario.noise_model()
    uclass = scenario.uncertainty_class()
    specific, _ = _specific(scenario, uclass)
    d = _design(scenario, noise, uclass, scenario.w_c, specific)
    sol = d.robust if solution_hook is None else solution_hook(d.robust)
    lower = cnr_from_response(params, noise, uclass.lower)
    inv = InverseCnrs.from_cnr(lower)

    residual = kkt_residual(sol, inv, d.cfg, scenario.budget)
    budget_gap = abs(sol.allocation.total - scenario.budget)
    report.add(
        "kkt_residual",
        residual <= KKT_LIMIT and budget_gap <= BUDGET_LIMIT,
        residual=residual,
        budget_gap=budget_gap,
    )

    saddle = verify_saddle_point(params, noise, uclass, d.cfg, sol, n_samples, seed)
    report.add("saddle_point", saddle.passed, **{k: v for k, v in saddle.to_dict().items() if k != "passed"})

    rng = np.random.default_rng(seed + 1)
    radar, comm = uclass.sample(rng, n_samples)
    cnr_up = cnr_from_response(params, noise, uclass.upper)
    a, b = d.cfg.alpha, d.cfg.beta
    p = sol.allocation.powers
    at_lo = float(weighted_log_sum(p, lower.radar_cnr, lower.comm_cnr, a, b))
    at_up = float(weighted_log_sum(p, cnr_up.radar_cnr, cnr_up.comm_cnr, a, b))
    scale = lower.radar_cnr / uclass.radar_lower
    sampled = weighted_log_sum(p, scale * radar, comm / noise.comm_noise_power, a, b)
    report.add(
        "bound_ordering",
        bool(np.all(sampled <= at_up + 1e-9) and np.all(sampled >= at_lo - 1e-9)),
        upper_margin=float(np.min(at_up - sampled)),
        lower_margin=float(np.min(sampled - at_lo)),
    )

    subset = _joint_minimizer_subset(lower.radar_cnr, lower.comm_cnr)
    if subset is None:
        report.add("worst_allocation", True, skipped="no joint CNR minimizer")
    else:
        wa = verify_worst_allocation(lower.subset(subset), d.cfg, 1e-3, scenario.budget)
        report.add("worst_allocation", wa.passed, subcarriers=subset.tolist(), **{
            k: v for k, v in wa.to_dict().items() if k != "passed"
        })

    errors = approximation_report(np.full(params.n_subcarriers, np.sqrt(1.0 / params.n_subcarriers)), params)
    report.add("spectral_approximation", float(errors.max()) <= APPROX_LIMIT, max_error=float(errors.max()))
    return report


def spectrum_check(
    scenario: Scenario, n_trials: int, seed: int, allocation: str = "uniform"
) -> list[dict]:
    """Per-subcarrier approximation error and Monte Carlo statistics of ``|S(f_m)|^2``."""
    params = scenario.ofdm
    n = params.n_subcarriers
    if allocation == "uniform":
        powers = np.full(n, scenario.budget / n)
    elif allocation == "robust":
        powers = plan(scenario).powers
    else:
        raise ConfigError(f"unknown allocation {allocation!r}")
    weights = np.sqrt(powers)
    expected = expected_power_spectrum(weights, params, params.subcarrier_frequencies)
    rel = approximation_report(weights, params)
    mean, std = monte_carlo_power_spectrum(weights, params, n_trials, seed)
    stderr = std / np.sqrt(n_trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, (mean - expected) / stderr, 0.0)
    return [
        {
            "subcarrier": m,
            "power": powers[m],
            "approx_error": rel[m],
            "expected": expected[m],
            "mc_mean": mean[m],
            "mc_std": std[m],
            "z_score": z[m],
        }
        for m in range(n)
    ]


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".12g")


def format_csv(records: Sequence[dict]) -> str:
    """Comma-separated text with a header row, 12 significant digits and LF endings."""
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0].keys())
    writer.writerow(header)
    for rec in records:
        writer.writerow([_fmt(rec[k]) for k in header])
    return buf.getvalue()


def rows_as_records(rows: Sequence[ExperimentRow]) -> list[dict]:
    return [asdict(r) for r in rows]


def write_rows(rows: Sequence[ExperimentRow], path) -> None:
    text = format_csv(rows_as_records(rows)) or ",".join(f.name for f in fields(ExperimentRow)) + "\n"
    Path(path).write_text(text, encoding="utf-8", newline="\n")

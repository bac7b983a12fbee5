import math

from robust_ircw import ObjectiveConfig, OfdmParams


def unit_grid(n: int) -> OfdmParams:
    """Grid with spacing 1 and no guard interval on one symbol, so T_p = 1."""
    return OfdmParams(n, 1.0, 0.0, 1)


def unit_cfg(w_c: float, n: int = 3) -> ObjectiveConfig:
    """Objective whose per-nat coefficients are exactly ``alpha' = 1 - w_c`` and ``beta' = w_c``."""
    return ObjectiveConfig.from_params(unit_grid(n), w_c, 1.0 / (2.0 * math.log(2.0)), 1.0 / math.log(2.0))

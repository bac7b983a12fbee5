"""How well ``T_s^2 N_s |a_m|^2`` predicts the pulse spectrum at each subcarrier.

Run with ``python3 demos/04_spectrum.py``.
"""

import numpy as np

from robust_ircw import REFERENCE_PARAMS, OfdmParams
from robust_ircw.spectrum import (
    WaveformSpec,
    approximation_report,
    cross_term_fraction,
    measure_papr,
    monte_carlo_power_spectrum,
)

# %% With a guard interval the sinc tails leak into neighbouring subcarriers
params = REFERENCE_PARAMS
weights = np.sqrt(np.full(params.n_subcarriers, 1.0 / params.n_subcarriers))
print("max relative error, uniform weights", round(float(np.max(approximation_report(weights, params))), 4))
print("max cross-term fraction            ", round(float(np.max(cross_term_fraction(weights, params))), 4))

# %% Without a guard interval the subcarriers are orthogonal and the approximation is exact
tight = OfdmParams(params.n_subcarriers, params.subcarrier_spacing, 0.0, params.n_symbols)
print("max relative error, no guard       ", f"{np.max(approximation_report(weights, tight)):.1e}")

# %% Monte Carlo over random phase codes agrees with the code-averaged spectrum
small = params.with_subcarriers(8)
w8 = np.sqrt(np.full(8, 1.0 / 8))
mean, std = monte_carlo_power_spectrum(w8, small, n_trials=4000, seed=1)
print("MC mean / (T_s^2 N_s p_m)          ", np.round(mean / (small.symbol_duration**2 * small.n_symbols / 8), 3))

# %% All-ones codes line the subcarriers up in phase: PAPR equals N_c
spec = WaveformSpec.from_powers(OfdmParams(8, 1.0, 0.0, 1), np.full(8, 1.0 / 8))
print("PAPR with all-ones codes, N_c = 8  ", round(measure_papr(spec, oversampling=16), 3))

"""Water-filling on a toy channel, then the two single-objective optima on the reference grid.

Run with ``python3 demos/01_water_filling.py``.
"""

import numpy as np

from robust_ircw import REFERENCE_PARAMS, comm_optimal, gaussian_bounds, noise_from_snr, radar_optimal, waterfill

# %% Four subcarriers with very different gains
cnr = np.array([8.0, 4.0, 1.0, 0.2])
res = waterfill(cnr, budget=1.0)
print("cnr          ", cnr)
print("powers       ", np.round(res.allocation.powers, 4))
print("water level  ", round(res.water_level, 4))
print("active set   ", res.active_set)
print("KKT residual ", f"{res.kkt_residual(cnr):.1e}")

# %% The weakest subcarrier switches on once the budget is large enough
for budget in (0.5, 1.0, 2.0, 5.0):
    p = waterfill(cnr, budget).allocation.powers
    print(f"budget {budget:>4}: {np.round(p, 3)}")

# %% Radar and comm optima at the upper bounds put power in different places
params = REFERENCE_PARAMS
noise = noise_from_snr(params, 5.0)
upper = gaussian_bounds(params).upper
radar = radar_optimal(params, noise, upper).allocation.powers
comm = comm_optimal(params, noise, upper).allocation.powers
m = np.arange(params.n_subcarriers)
print("radar optimum centre of mass", round(float(m @ radar), 1))
print("comm optimum centre of mass ", round(float(m @ comm), 1))

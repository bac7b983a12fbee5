"""Minimax-robust allocation at the baseline bounds and a look at its saddle point.

Run with ``python3 demos/02_robust_design.py``.
"""

import numpy as np

from robust_ircw import (
    REFERENCE_PARAMS,
    InverseCnrs,
    ObjectiveConfig,
    cnr_from_response,
    compute_normalizers,
    gaussian_bounds,
    kkt_residual,
    noise_from_snr,
    solve_robust,
    verify_saddle_point,
)

params = REFERENCE_PARAMS
noise = noise_from_snr(params, 5.0)
uclass = gaussian_bounds(params)
f_r, f_c = compute_normalizers(params, noise, uclass)

# %% Sweep the communications weight and watch the power move
for w_c in (0.0, 0.25, 0.5, 0.75, 1.0):
    cfg = ObjectiveConfig.from_params(params, w_c, f_r, f_c)
    sol = solve_robust(params, noise, uclass, cfg)
    p = sol.allocation.powers
    print(
        f"w_c {w_c:4.2f}: worst-case value {sol.worst_case_value:.4f}, "
        f"active {int(np.sum(p > 1e-12)):3d}, peak subcarrier {int(np.argmax(p)):3d}"
    )

# %% The design is optimal at the lower bounds and those bounds are the worst case for it
cfg = ObjectiveConfig.from_params(params, 0.5, f_r, f_c)
sol = solve_robust(params, noise, uclass, cfg)
inv = InverseCnrs.from_cnr(cnr_from_response(params, noise, uclass.lower))
print("KKT residual  ", f"{kkt_residual(sol, inv, cfg):.1e}")
report = verify_saddle_point(params, noise, uclass, cfg, sol, n_samples=200, seed=0, n_allocation_samples=200)
print("saddle point  ", "holds" if report.passed else "violated", report.to_dict())

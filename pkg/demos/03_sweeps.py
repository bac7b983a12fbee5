"""Robust versus non-robust designs across SNR, bound width and the weight trade-off.

Run with ``python3 demos/03_sweeps.py``. The non-robust design is tuned to the
class midpoint; both designs are scored at the lower and upper bounds.
"""

from robust_ircw import BoundFamily
from robust_ircw.experiments import Scenario, run_snr_sweep, run_tradeoff, run_width_sweep


def show(title, rows, label):
    print(f"\n{title}")
    print(f"{label:>8} {'DIR rob lo':>12} {'DIR non lo':>12} {'MI rob lo':>10} {'MI non lo':>10}")
    for r in rows:
        print(
            f"{r.sweep_value:8.2f} {r.dir_robust_lower:12.4g} {r.dir_nonrobust_lower:12.4g} "
            f"{r.mi_robust_lower:10.2f} {r.mi_nonrobust_lower:10.2f}"
        )


# %% SNR: the robust design always keeps more rate at the lower bounds
show("SNR sweep, baseline bounds", run_snr_sweep(Scenario()), "SNR dB")

# %% Wider classes cost the robust design more at the lower bounds
show("width sweep, fixed upper bounds", run_width_sweep(Scenario(family=BoundFamily("fixed_upper"))), "width")

# %% Moving w_c from 0 to 1 trades MI for DIR
show("trade-off at 15 dB", run_tradeoff(Scenario(snr_db=15.0)), "w_c")

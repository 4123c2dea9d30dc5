"""
How many ADCs?
==============

At a fixed bit budget, fewer ADC chains get more levels each. This sweep
over the combining ratio ``r = P / N_r`` shows where the trade-off lands
with and without dither, at the reference-scale scenario with a reduced trial
count.
"""

import sys

from taskquant import harness
from taskquant.channel import ScenarioConfig

n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 100
cfg = ScenarioConfig.reference(master_seed=4)
spec = harness.SweepSpec(cfg, strategies=["DI"], rates=[2, 4], k_dithers=[0, 2],
                         p_tildes=[4, 8, 12, 13, 16, 20], n_trials=n_trials, n_saa=5000)
result = harness.sweep_ratio(spec)

for row in result.sorted_rows():
    if row.skipped:
        print(f"R={row.rate} K_d={row.k_dither} r={row.combining_ratio:.2f}: skipped ({row.skipped_reason})")
    else:
        print(f"R={row.rate} K_d={row.k_dither} r={row.combining_ratio:.2f}: "
              f"M={row.m_levels:<4d} MSE {row.mse_empirical:.4e} (predicted {row.mse_predicted_mean:.4e})")

# Dither whitens the quantization error but adds noise of its own, so the
# undithered curves sit lower; with two dither signals at R = 2 the points
# beyond r = 0.6 have too few levels for any valid support.

"""
Quantization rate sweep
=======================

MSE against the rate ``R`` at ``r = 1`` for all four receivers, with the
gap between the task-based DI design and the task-ignorant digital-only
receiver in dB. Writes the CSV next to the script's working directory.
"""

import sys

from taskquant import harness
from taskquant.channel import ScenarioConfig

n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 100
cfg = ScenarioConfig.reference(master_seed=5)
result = harness.sweep_rate(harness.reference_rate_spec(cfg, n_trials=n_trials))

with open("rate_sweep.csv", "w") as fh:
    fh.write(result.to_csv())

floor = result.get(strategy="no-quant").mse_empirical
print(f"no quantization: {floor:.4e}")
print(f"{'R':>3} {'DD':>10} {'DI':>10} {'digital':>10} {'DI vs digital':>14}")
for rate in range(2, 17):
    dd, di, dig = (result.get(strategy=s, rate=rate) for s in ("DD", "DI", "digital-only"))
    print(f"{rate:>3} {dd.mse_empirical:10.3e} {di.mse_empirical:10.3e} {dig.mse_empirical:10.3e} "
          f"{harness.db_ratio(dig.mse_empirical, di.mse_empirical):+11.2f} dB")

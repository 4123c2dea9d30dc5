"""
One frame through the receiver
==============================

Combine, quantize and estimate a single frame with each receiver, then
average a few hundred frames to see the ordering no-quantization, DD, DI,
digital-only.
"""

import numpy as np

from taskquant import design, pipeline
from taskquant.channel import ScenarioConfig, draw_frame, rng_stream
from taskquant.quantizer import resolution_from_budget

cfg = ScenarioConfig.jakes(n_tx=4, n_rx=8, n_snapshots=16, sigma_w2=1e-3, master_seed=3)
rate = 4
quant = design.make_quantizer(cfg, resolution_from_budget(rate, cfg.n_rx, cfg.n_snapshots, cfg.n_rx),
                              k_dither=0, eta=2.0, p_tilde=cfg.n_rx)
di = design.design_di(cfg, quant, 5000, rng_stream(cfg.master_seed, "saa"))
digital = pipeline.digital_only_quantizer(cfg, rate, 0, 2.0)

results = {"no-quant": [], "DD": [], "DI": [], "digital-only": []}
for t in range(300):
    frame = draw_frame(cfg, t)
    dither = rng_stream(cfg.master_seed, t, "dither")
    dd = design.design_dd(cfg, frame.theta, quant)
    results["no-quant"].append(pipeline.baseline_no_quant(cfg, frame).mse)
    results["DD"].append(pipeline.run_frame(cfg, dd, frame, dither).mse)
    results["DI"].append(pipeline.run_frame(cfg, di, frame, rng_stream(cfg.master_seed, t, "dither")).mse)
    results["digital-only"].append(
        pipeline.baseline_digital_only(cfg, frame, rate, 0, rng_stream(cfg.master_seed, t, "dither"),
                                       spec=digital).mse)

for name, vals in results.items():
    vals = np.asarray(vals)
    print(f"{name:>13}: {vals.mean():.4e} +- {vals.std(ddof=1) / np.sqrt(vals.size):.1e}")

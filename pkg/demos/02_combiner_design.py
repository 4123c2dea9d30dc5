"""
Designing the analog combiner
=============================

For one transmitted signal realization the data-dependent (DD) design picks
``A = U diag(sigma) V^H R_A^{-1/2}``: ``V`` holds the receive eigenmodes,
``sigma^2`` is a water-filling allocation and the DFT rotation ``U`` spreads
power evenly over the ADCs. The data-independent (DI) design replaces the
realization by a sample average over many draws.
"""

import numpy as np

from taskquant import design
from taskquant.channel import ScenarioConfig, draw_frame, rng_stream
from taskquant.quantizer import resolution_from_budget

cfg = ScenarioConfig.reference(master_seed=1)
p_tilde, rate = 8, 4
m_levels = resolution_from_budget(rate, cfg.n_rx, cfg.n_snapshots, p_tilde)
quant = design.make_quantizer(cfg, m_levels, k_dither=0, eta=2.0, p_tilde=p_tilde)
print(f"P={p_tilde} ADC chains, M={m_levels} levels, support gamma={quant.gamma:.3f}")

frame = draw_frame(cfg, trial=0)
dd = design.design_dd(cfg, frame.theta, quant)
di = design.design_di(cfg, quant, n_samples=10_000, rng=rng_stream(cfg.master_seed, "saa"))

print("receive eigenvalues:", np.round(dd.lambda_a[:p_tilde], 3))
print("DD allocation:      ", np.round(dd.allocation, 4))
print("DI allocation:      ", np.round(di.allocation, 4))

# Every ADC sees the same input power, so one support fits all chains.
gram = dd.a @ cfg.r_a @ dd.a.conj().T
print("diag(A R_A A^H):", np.round(np.diag(gram).real, 6))

###############################################################################
# Predicted error
# ---------------
# The estimator is an LMMSE matrix computed per frame; its closed-form MSE
# is the design target. A uniform allocation over the same modes does worse.

uniform = design.build_A(np.full(p_tilde, 1 / np.sqrt(p_tilde)), dd.v, cfg.r_a)
for name, a in (("DD", dd.a), ("DI", di.a), ("uniform", uniform)):
    mse = design.predicted_mse(a, frame.theta, cfg.r_a, cfg.r_b, cfg.sigma_w2,
                               quant.gamma, quant.k_dither, quant.m_levels)
    print(f"{name:>8}: predicted MSE {mse:.4e}")

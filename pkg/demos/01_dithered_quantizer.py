"""
Dithered uniform quantizer
==========================

A midrise quantizer with ``M`` levels on ``[-gamma, gamma]`` behaves like an
additive white noise source once a few uniform dither signals are added to
its input. This script measures that noise and compares it with
``2 (K_d + 1) gamma^2 / (3 M^2)``.
"""

import numpy as np

from taskquant import quantizer
from taskquant.quantizer import QuantizerSpec

rng = np.random.default_rng(0)

# Small Gaussian input, well inside the support even after dithering.
x = 0.2 * (rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000))

print(f"{'K_d':>4} {'measured':>10} {'model':>10} {'corr(x, e)':>11}")
for k_dither in (0, 1, 2, 3):
    spec = QuantizerSpec(m_levels=8, k_dither=k_dither, eta=2.0, gamma=1.0, p_tilde=1)
    err = quantizer.quantize_vector(x, spec, rng) - x
    rho = np.corrcoef(x.real, err.real)[0, 1]
    print(f"{k_dither:>4} {np.mean(np.abs(err) ** 2):10.5f} "
          f"{quantizer.quantization_noise_variance(spec):10.5f} {rho:11.4f}")

# Without dither the error is a deterministic function of the input and the
# model is only approximate; from K_d = 1 on, the variance is matched and
# the error is uncorrelated with the input.

###############################################################################
# Bit budget and feasibility
# --------------------------
# With ``R`` bits per antenna and snapshot, ``N_r = 20`` antennas and ``P``
# ADC chains, each chain gets ``M = floor(2^(R N_r / (2 P)))`` levels per real
# dimension. Two dither signals need ``eta < sqrt(3/4) M``, so at ``R = 2``
# with ``eta = 2`` only ``P <= 12`` (combining ratio 0.6) is feasible.

for p in (10, 12, 13, 20):
    m = quantizer.resolution_from_budget(2, 20, 40, p)
    print(f"P={p:2d}: M={m}, feasible with K_d=2: {quantizer.is_feasible(2.0, 2, m)}")

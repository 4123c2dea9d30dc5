"""
Per-frame sensing receiver: analog combining, dithered quantization and
digital LMMSE estimation, plus the no-quantization and digital-only
baselines.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .design import LinearEstimator, sigma_max_sq
from .errors import DimensionMismatch
from .quantizer import (
    QuantizerSpec, dithered_input, kappa, overload_fraction, quantization_noise_variance,
    quantize_components, resolution_from_budget, support_from_combiner, PER_REAL_DIM,
)

NO_QUANT = "no-quant"
DIGITAL_ONLY = "digital-only"


@dataclass
class TrialOutcome:
    squared_error: float
    n_params: int
    strategy: str
    overloaded_fraction: float = 0.0
    predicted_mse: float = float("nan")

    @property
    def mse(self):
        return self.squared_error / self.n_params


def combine(a, y_vec):
    """``u = (I_L kron A) y``, applied snapshot by snapshot."""
    a = np.asarray(a)
    y_vec = np.asarray(y_vec)
    n_rx = a.shape[1]
    if y_vec.size % n_rx:
        raise DimensionMismatch(f"y has length {y_vec.size}, not a multiple of N_r={n_rx}")
    return linalg.vec(a @ linalg.unvec(y_vec, n_rx, y_vec.size // n_rx))


def estimate(b, z):
    b = np.asarray(b)
    z = np.asarray(z)
    if b.shape[1] != z.size:
        raise DimensionMismatch(f"B has {b.shape[1]} columns, z has length {z.size}")
    return b @ z


def _quantized_outcome(cfg, a, spec, frame, rng, strategy, quantize=True):
    u = combine(a, frame.y_vec)
    if quantize:
        dithered = dithered_input(u, spec, rng)
        z = quantize_components(dithered, spec)
        over = overload_fraction(dithered, spec.gamma)
    else:
        z, over = u, 0.0
    est = LinearEstimator(a, frame.theta, cfg.r_a, cfg.r_b, cfg.sigma_w2,
                          quantization_noise_variance(spec) if quantize else 0.0)
    g_hat = est.estimate(z)
    err = float(np.sum(np.abs(g_hat - frame.g_vec) ** 2))
    return TrialOutcome(err, frame.g_vec.size, strategy, over, est.mse())


def run_frame(cfg, design, frame, rng, quantize=True):
    """
    Combine, quantize and estimate one frame with a designed combiner.

    ``quantize=False`` replaces the quantizer by the identity and drops the
    quantization-noise term from the estimator (a test hook).
    """
    if design.a.shape[1] != cfg.n_rx:
        raise DimensionMismatch("design does not match the scenario's N_r")
    return _quantized_outcome(cfg, design.a, design.quant, frame, rng, design.strategy, quantize)


def baseline_no_quant(cfg, frame):
    """LMMSE estimate from the unquantized received signal."""
    est = LinearEstimator(np.eye(cfg.n_rx), frame.theta, cfg.r_a, cfg.r_b, cfg.sigma_w2, 0.0)
    g_hat = est.estimate(frame.y_vec)
    err = float(np.sum(np.abs(g_hat - frame.g_vec) ** 2))
    return TrialOutcome(err, frame.g_vec.size, NO_QUANT, 0.0, est.mse())


def digital_only_quantizer(cfg, rate, k_dither, eta, convention=PER_REAL_DIM):
    """Quantizer for ``A = I``: one ADC per antenna, support from the largest ``(R_A)_{ii}``."""
    m_levels = resolution_from_budget(rate, cfg.n_rx, cfg.n_snapshots, cfg.n_rx, convention)
    kap = kappa(eta, k_dither, m_levels)
    smax2 = sigma_max_sq(cfg.r_theta, cfg.r_b, cfg.sigma_w2)
    gamma = support_from_combiner(kap, smax2, cfg.r_a)
    return QuantizerSpec(m_levels, k_dither, eta, gamma, cfg.n_rx)


def baseline_digital_only(cfg, frame, rate, k_dither, rng, eta=2.0, convention=PER_REAL_DIM, spec=None):
    """Task-ignorant receiver: quantize every antenna, then LMMSE with ``A = I``."""
    if spec is None:
        spec = digital_only_quantizer(cfg, rate, k_dither, eta, convention)
    return _quantized_outcome(cfg, np.eye(cfg.n_rx), spec, frame, rng, DIGITAL_ONLY)

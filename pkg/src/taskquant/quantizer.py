"""
Bit-budget accounting and non-subtractive dithered uniform scalar quantizers.

Each complex ADC quantizes the real and imaginary parts with the same
midrise quantizer of ``M`` levels on ``[-gamma, gamma]``. Dither is added
before quantization and never removed.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import Infeasible, ResolutionTooLow

PER_REAL_DIM = "per-real-dim"
PAPER_LITERAL = "paper-literal"
CONVENTIONS = (PER_REAL_DIM, PAPER_LITERAL)


def resolution_from_budget(rate, n_rx, n_snapshots, p_tilde, convention=PER_REAL_DIM):
    """
    Levels per real dimension for ``p_tilde`` ADCs sharing ``R * N_r * L`` bits.

    With the default ``"per-real-dim"`` convention each complex sample spends
    ``2 log2(M)`` bits, giving ``M = floor(2 ** (R N_r / (2 P)))``. The
    ``"paper-literal"`` convention drops the factor of two.
    """
    if min(n_rx, n_snapshots, p_tilde) < 1 or rate <= 0:
        raise ValueError("counts must be >= 1 and rate > 0")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown budget convention {convention!r}")
    m_bit = Fraction(rate).limit_denominator(10**6) * n_rx * n_snapshots
    exponent = m_bit / (p_tilde * n_snapshots)
    if convention == PER_REAL_DIM:
        exponent /= 2
    if exponent.denominator == 1:
        m_levels = 2 ** int(exponent)
    else:
        m_levels = math.floor(2.0 ** float(exponent))
    if m_levels < 2:
        raise ResolutionTooLow(f"budget gives M={m_levels} levels for P={p_tilde} ADCs")
    return m_levels


def kappa(eta, k_dither, m_levels):
    """``eta^2 / (1 - 2 K_d eta^2 / (3 M^2))``; raises Infeasible when the denominator is <= 0."""
    if m_levels < 2:
        raise ValueError("m_levels must be >= 2")
    denom = 1.0 - 2.0 * k_dither * eta**2 / (3.0 * m_levels**2)
    if denom <= 0:
        raise Infeasible(
            f"eta={eta} with K_d={k_dither} needs M > {eta * math.sqrt(2 * k_dither / 3):.4g}, got M={m_levels}")
    return eta**2 / denom


def is_feasible(eta, k_dither, m_levels):
    try:
        kappa(eta, k_dither, m_levels)
    except Infeasible:
        return False
    return True


def support_from_combiner(kappa_value, sigma_max2, a_gram):
    """Support ``gamma = sqrt(kappa * sigma_max^2 * max_i (A R_A A^H)_{ii})``."""
    diag = np.real(np.diag(np.atleast_2d(a_gram)))
    return math.sqrt(kappa_value * sigma_max2 * float(np.max(diag)))


@dataclass(frozen=True)
class QuantizerSpec:
    m_levels: int
    k_dither: int
    eta: float
    gamma: float
    p_tilde: int

    def __post_init__(self):
        if self.m_levels < 2:
            raise ResolutionTooLow(f"m_levels={self.m_levels}")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def delta(self):
        return 2.0 * self.gamma / self.m_levels

    @property
    def kappa(self):
        return kappa(self.eta, self.k_dither, self.m_levels)

    @property
    def feasible(self):
        return is_feasible(self.eta, self.k_dither, self.m_levels)

    @property
    def levels(self):
        return -self.gamma + self.delta * (np.arange(self.m_levels) + 0.5)

    def to_dict(self):
        return {
            "m_levels": self.m_levels,
            "k_dither": self.k_dither,
            "eta": self.eta,
            "gamma": self.gamma,
            "delta": self.delta,
            "p_tilde": self.p_tilde,
        }


def uniform_quantize(alpha, gamma, m_levels):
    """
    Midrise uniform quantizer on ``[-gamma, gamma]``, vectorized over `alpha`.

    In-range inputs map to ``-gamma + delta (l + 1/2)`` with
    ``l = floor((alpha + gamma) / delta)`` clamped to ``[0, M - 1]``;
    overloaded inputs saturate at ``sign(alpha) (gamma - delta / 2)``.
    """
    alpha = np.asarray(alpha, dtype=float)
    delta = 2.0 * gamma / m_levels
    idx = np.clip(np.floor((alpha + gamma) / delta), 0, m_levels - 1)
    # clamping the cell index also handles saturation, so overloaded inputs
    # land exactly on the outermost levels
    out = -gamma + delta * (idx + 0.5)
    return out if out.ndim else float(out)


def dithered_input(u, spec, rng):
    """
    ``u + sum_k xi_k`` with independent uniform dither per element.

    Draws are consumed in element order: element ``i`` takes ``2 K_d``
    consecutive uniforms (real parts first, then imaginary).
    """
    u = np.asarray(u, dtype=complex)
    if spec.k_dither == 0 or u.size == 0:
        return u.copy()
    half = spec.delta / 2
    xi = rng.uniform(-half, half, size=u.shape + (2, spec.k_dither)).sum(axis=-1)
    return u + xi[..., 0] + 1j * xi[..., 1]


def quantize_components(x, spec):
    """Quantize real and imaginary parts of an already-dithered input."""
    x = np.asarray(x, dtype=complex)
    return (uniform_quantize(x.real, spec.gamma, spec.m_levels)
            + 1j * uniform_quantize(x.imag, spec.gamma, spec.m_levels))


def quantize_vector(u, spec, rng):
    """Element-wise dithered quantization of a complex vector."""
    return quantize_components(dithered_input(u, spec, rng), spec)


def dithered_quantize(x, spec, rng):
    """Scalar form of :func:`quantize_vector`."""
    return complex(quantize_vector(np.array([x]), spec, rng)[0])


def overload_fraction(x, gamma):
    """Fraction of real dimensions of `x` outside ``[-gamma, gamma]``."""
    x = np.asarray(x, dtype=complex)
    if x.size == 0:
        return 0.0
    over = (np.abs(x.real) > gamma).sum() + (np.abs(x.imag) > gamma).sum()
    return float(over) / (2 * x.size)


def quantization_noise_variance(spec):
    """Complex error variance ``2 (K_d + 1) gamma^2 / (3 M^2)`` of the dithered quantizer."""
    return 2.0 * (spec.k_dither + 1) * spec.gamma**2 / (3.0 * spec.m_levels**2)

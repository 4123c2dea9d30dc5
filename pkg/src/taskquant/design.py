"""
Analog combiner design for the data-dependent (DD) and data-independent (DI)
strategies, the matching digital LMMSE matrix, and the predicted MSE.

The analog matrix is ``A = U diag(sigma) V^H R_A^{-1/2}`` where ``U`` is the
unitary DFT matrix, ``V`` the eigenbasis of ``R_A`` and ``sigma_i^2 = p_i``
the solution of a concave power-allocation problem over the simplex.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import linalg
from .channel import matrix_to_json, sample_signals
from .errors import DegenerateProblem, DimensionMismatch, Singular
from .quantizer import QuantizerSpec, kappa as kappa_fn, quantization_noise_variance

DD = "DD"
DI = "DI"


@dataclass
class SignalSpectrum:
    eigenvalues: np.ndarray
    u_prime: np.ndarray
    d_b: np.ndarray


def _check_theta(theta, n_tx):
    theta = np.asarray(theta)
    if theta.ndim != 2 or theta.shape[0] != n_tx:
        raise DimensionMismatch(f"theta has shape {theta.shape}, expected ({n_tx}, L)")
    return theta


def signal_spectrum(r_b_sqrt, r_b, theta):
    """
    Eigenstructure of ``R_B^{1/2} Theta^* Theta^T (R_B^{1/2})^H``.

    Returns the eigenvalues (descending), the eigenvectors ``U'`` and the
    diagonal ``d_B`` of ``U'^H R_B U'``.
    """
    r_b_sqrt = np.asarray(r_b_sqrt)
    theta = _check_theta(theta, r_b_sqrt.shape[0])
    x = r_b_sqrt @ theta.conj()
    gram = x @ x.conj().T
    values, vectors = linalg.hermitian_eig(linalg.hermitian_part(gram), tol=np.inf)
    d_b = np.real(np.einsum("ji,jk,ki->i", vectors.conj(), r_b, vectors))
    return SignalSpectrum(values, vectors, d_b)


def sigma_max_sq(r_theta, r_b, sigma_w2):
    """``Tr(R_theta^* R_B) + sigma_w^2``."""
    return float(np.real(np.trace(np.conj(r_theta) @ r_b))) + sigma_w2


def beta_param(k_dither, kappa, sigma_max2, m_levels, p_tilde):
    return 2.0 * (k_dither + 1) * kappa * sigma_max2 / (3.0 * m_levels**2 * p_tilde)


# --- power allocation -------------------------------------------------------

def allocation_objective(p, lambda_a, weights, eigvals, sigma_w2, beta):
    """
    ``sum_n sum_i w_n lambda_A,i lambda'_n p_i / ((lambda'_n + sigma_w^2) p_i + beta)``.
    """
    p = np.asarray(p, dtype=float)
    lambda_a = np.asarray(lambda_a, dtype=float)
    w = np.asarray(weights, dtype=float)
    lam = np.asarray(eigvals, dtype=float)
    den = np.multiply.outer(p, lam + sigma_w2) + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(den > 0, (w * lam) * p[:, None] / den, 0.0)
    return float(lambda_a @ terms.sum(axis=1))


class _Marginals:
    """Marginal gains ``g_i(p) = lambda_A,i * h'(p)`` of the allocation objective."""

    def __init__(self, lambda_a, weights, eigvals, sigma_w2, beta):
        self.lambda_a = np.asarray(lambda_a, dtype=float)
        w = np.asarray(weights, dtype=float)
        lam = np.asarray(eigvals, dtype=float)
        keep = (w * lam) > 0
        self.c = (w * lam)[keep] * beta
        self.a = (lam + sigma_w2)[keep]
        self.beta = beta

    def value_and_slope(self, p, rows=slice(None)):
        den = np.multiply.outer(p, self.a) + self.beta
        inv2 = self.c / den**2
        g = inv2.sum(axis=-1)
        dg = -2.0 * (inv2 * self.a / den).sum(axis=-1)
        lam_a = self.lambda_a[rows]
        return lam_a * g, lam_a * dg

    def gains(self, p):
        return self.value_and_slope(np.asarray(p, dtype=float))[0]


def _solve_level(marg, t, g0, g1, max_iter=100):
    """
    Allocation ``p_i`` with ``g_i(p_i) = t^-2`` (clipped to [0, 1]).

    Works on ``phi(p) = g(p)^{-1/2}``, which is exactly affine in ``p`` for a
    single spectral term and close to affine otherwise; Newton steps are
    safeguarded by a per-entry bisection bracket.
    """
    mu = t ** -2
    p = np.where(g1 >= mu, 1.0, 0.0)
    rows = np.flatnonzero((g0 > mu) & (g1 < mu))
    if rows.size == 0:
        return p
    phi0, phi1 = g0[rows] ** -0.5, g1[rows] ** -0.5
    lo = np.zeros(rows.size)
    hi = np.ones(rows.size)
    x = np.clip((t - phi0) / (phi1 - phi0), 0.0, 1.0)
    for _ in range(max_iter):
        g, dg = marg.value_and_slope(x, rows)
        phi = g ** -0.5
        f = phi - t
        lo = np.where(f < 0, x, lo)
        hi = np.where(f > 0, x, hi)
        # overflowing steps are caught by the bracket test below
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            step = f / (-0.5 * phi**3 * dg)
        x_new = x - step
        bad = ~np.isfinite(x_new) | (x_new <= lo) | (x_new >= hi)
        x_new = np.where(bad, 0.5 * (lo + hi), x_new)
        done = np.abs(x_new - x) <= 1e-16 + 1e-14 * x
        x = x_new
        if np.all(done):
            break
    p[rows] = x
    return p


def solve_power_allocation(lambda_a, weights, eigvals, sigma_w2, beta, tol=1e-12):
    """
    Maximize :func:`allocation_objective` over ``{p >= 0, sum p = 1}``.

    Dual water-filling: for a level ``mu`` every ``p_i(mu)`` solves
    ``g_i(p_i) = mu`` (or sits at a bound), and ``mu`` is found so that the
    allocations sum to one. Returns the allocation ``p`` (``sigma_i^2``).
    """
    lambda_a = np.clip(np.asarray(lambda_a, dtype=float), 0.0, None)
    if beta <= 0:
        raise ValueError("beta must be positive")
    n = lambda_a.size
    if n == 0:
        raise ValueError("empty allocation problem")
    marg = _Marginals(lambda_a, weights, eigvals, sigma_w2, beta)
    g0 = marg.gains(np.zeros(n))
    if not np.any(g0 > 0):
        raise DegenerateProblem("all marginal gains vanish")
    if n == 1:
        return np.ones(1)
    g1 = marg.gains(np.ones(n))

    active = g0 > 0
    # levels parametrized by t = mu^{-1/2}; sum p(t) is nondecreasing in t
    t_lo = np.min(g0[active] ** -0.5)
    t_hi = np.max(g1[active] ** -0.5)

    def excess(t):
        return _solve_level(marg, t, g0, g1).sum() - 1.0

    if excess(t_hi) <= 0:
        # only reachable when a single mode is active
        p = np.where(g0 == g0.max(), 1.0, 0.0)
        return p / p.sum()
    t_star = scipy.optimize.brentq(excess, t_lo, t_hi, xtol=tol * t_hi * 1e-3, rtol=4 * np.finfo(float).eps,
                                   maxiter=200)
    p = _solve_level(marg, t_star, g0, g1)
    # on a flat stretch of excess(t) brentq may leave round-off dust on a
    # mode that belongs off the support
    p[p < 1e-14] = 0.0
    return p / p.sum()


def kkt_residual(p, lambda_a, weights, eigvals, sigma_w2, beta, support_tol=0.0):
    """
    Relative KKT residual of an allocation.

    With ``mu`` the mean marginal gain on the support, returns the largest of
    ``|g_i(p_i) - mu| / mu`` over the support and ``(g_i(0) - mu)_+ / mu``
    off it.
    """
    p = np.asarray(p, dtype=float)
    marg = _Marginals(np.clip(lambda_a, 0.0, None), weights, eigvals, sigma_w2, beta)
    g = marg.gains(p)
    support = p > support_tol
    mu = g[support].mean()
    res_on = np.max(np.abs(g[support] - mu)) / mu
    off = ~support
    res_off = np.max(np.clip(marg.gains(np.zeros(p.size))[off] - mu, 0.0, None)) / mu if off.any() else 0.0
    return float(max(res_on, res_off))


# --- matrices -----------------------------------------------------------------

def build_A(lambda_diag, v, r_a):
    """``A = U Lambda V^H R_A^{-1/2}`` with ``U`` the unitary DFT matrix of size ``len(lambda_diag)``."""
    sig = np.asarray(lambda_diag, dtype=float)
    p_tilde = sig.size
    v = np.asarray(v)
    if v.shape[1] < p_tilde:
        raise DimensionMismatch("more ADC chains than receive antennas")
    u_rot = linalg.dft_matrix(p_tilde)
    return (u_rot * sig) @ v[:, :p_tilde].conj().T @ linalg.psd_inv_sqrt(r_a)


def _regularized_gram(a, theta, r_a, r_b, sigma_w2, noise_var):
    n_snap = theta.shape[1]
    s = theta.T @ r_b @ theta.conj() + sigma_w2 * np.eye(n_snap)
    c = a @ r_a @ a.conj().T
    return np.kron(s, c) + noise_var * np.eye(n_snap * a.shape[0])


def build_B(a, theta, r_a, r_b, sigma_w2, gamma, k_dither, m_levels):
    """
    Digital LMMSE matrix for a given analog combiner, evaluated directly.

    ``B = (R_B Theta^* kron R_A A^H) [((Theta^T R_B Theta^* + sigma_w^2 I) kron A R_A A^H) + c I]^{-1}``
    with ``c = 2 (K_d + 1) gamma^2 / (3 M^2)``.
    """
    a = np.asarray(a)
    theta = np.asarray(theta)
    noise_var = 2.0 * (k_dither + 1) * gamma**2 / (3.0 * m_levels**2)
    left = np.kron(r_b @ theta.conj(), r_a @ a.conj().T)
    if not left.any():
        return np.zeros_like(left)
    gram = _regularized_gram(a, theta, r_a, r_b, sigma_w2, noise_var)
    # B = left @ gram^{-1}  <=>  gram^H B^H = left^H, gram Hermitian
    return linalg.solve_hermitian(gram, left.conj().T).conj().T


def predicted_mse(a, theta, r_a, r_b, sigma_w2, gamma, k_dither, m_levels):
    """Average per-entry MSE of the LMMSE estimate for a fixed signal, evaluated directly."""
    a = np.asarray(a)
    theta = np.asarray(theta)
    n_tx, n_rx = r_b.shape[0], r_a.shape[0]
    prior = float(np.real(np.trace(r_b)) * np.real(np.trace(r_a)))
    noise_var = 2.0 * (k_dither + 1) * gamma**2 / (3.0 * m_levels**2)
    num = np.kron(theta.T @ r_b @ r_b @ theta.conj(), a @ r_a @ r_a @ a.conj().T)
    if not num.any():
        return prior / (n_tx * n_rx)
    gram = _regularized_gram(a, theta, r_a, r_b, sigma_w2, noise_var)
    gain = np.real(np.trace(linalg.solve_hermitian(gram, num)))
    return (prior - gain) / (n_tx * n_rx)


class LinearEstimator:
    """
    Fast LMMSE estimator for one frame, exploiting the Kronecker structure.

    Both factors of ``(S kron C) + c I`` are diagonalized separately, so no
    ``LP x LP`` matrix is formed. With ``noise_var = 0`` the inverse is a
    pseudo-inverse (eigenvalues below ``rel_floor`` of the largest dropped).
    """

    def __init__(self, a, theta, r_a, r_b, sigma_w2, noise_var, rel_floor=1e-12):
        self.a = np.asarray(a)
        self.theta = np.asarray(theta)
        self.r_a, self.r_b = r_a, r_b
        n_snap = self.theta.shape[1]
        s = self.theta.T @ r_b @ self.theta.conj() + sigma_w2 * np.eye(n_snap)
        c = self.a @ r_a @ self.a.conj().T
        s_val, self.q_s = np.linalg.eigh(linalg.hermitian_part(s))
        c_val, self.q_c = np.linalg.eigh(linalg.hermitian_part(c))
        den = np.outer(np.clip(c_val, 0, None), np.clip(s_val, 0, None)) + noise_var
        keep = den > rel_floor * max(den.max(), 0.0)
        self.inv_den = np.where(keep, 1.0 / np.where(keep, den, 1.0), 0.0)
        self.noise_var = noise_var

    def estimate(self, z):
        """``g_hat = B z`` without forming ``B``; returns ``vec`` of the ``N_r x N_t`` estimate."""
        p_tilde, n_snap = self.a.shape[0], self.theta.shape[1]
        zm = linalg.unvec(z, p_tilde, n_snap)
        x = self.q_c.conj().T @ zm @ self.q_s.conj()
        x = self.q_c @ (x * self.inv_den) @ self.q_s.T
        g_hat = self.r_a @ self.a.conj().T @ x @ self.theta.conj().T @ self.r_b.T
        return linalg.vec(g_hat)

    def mse(self):
        n_tx, n_rx = self.r_b.shape[0], self.r_a.shape[0]
        prior = float(np.real(np.trace(self.r_b)) * np.real(np.trace(self.r_a)))
        t = self.theta.T @ self.r_b @ self.r_b @ self.theta.conj()
        k = self.a @ self.r_a @ self.r_a @ self.a.conj().T
        t_d = np.real(np.einsum("ji,jk,ki->i", self.q_s.conj(), t, self.q_s))
        k_d = np.real(np.einsum("ji,jk,ki->i", self.q_c.conj(), k, self.q_c))
        gain = float(k_d @ self.inv_den @ t_d)
        return (prior - gain) / (n_tx * n_rx)

    def matrix(self):
        """Explicit ``B``; for tests and small problems."""
        q = np.kron(self.q_s, self.q_c)
        left = np.kron(self.r_b @ self.theta.conj(), self.r_a @ self.a.conj().T)
        return left @ (q * self.inv_den.reshape(-1, order="F")) @ q.conj().T


# --- designs ------------------------------------------------------------------

@dataclass
class CombinerDesign:
    a: np.ndarray
    lambda_diag: np.ndarray
    v: np.ndarray
    u_rot: np.ndarray
    lambda_a: np.ndarray
    kappa: float
    beta: float
    sigma_max2: float
    gamma: float
    strategy: str
    quant: QuantizerSpec

    @property
    def allocation(self):
        return self.lambda_diag**2

    def estimator(self, cfg, theta):
        return LinearEstimator(self.a, theta, cfg.r_a, cfg.r_b, cfg.sigma_w2,
                               quantization_noise_variance(self.quant))

    def to_dict(self):
        return {
            "strategy": self.strategy,
            "quant": self.quant.to_dict(),
            "kappa": self.kappa,
            "beta": self.beta,
            "sigma_max2": self.sigma_max2,
            "gamma": self.gamma,
            "lambda_diag": [float(x) for x in self.lambda_diag],
            "lambda_a": [float(x) for x in self.lambda_a],
            "a": matrix_to_json(self.a),
            "v": matrix_to_json(self.v),
        }


def make_quantizer(cfg, m_levels, k_dither, eta, p_tilde):
    """Quantizer for an equal-diagonal combiner (trace one): ``gamma = sqrt(kappa / P) * sigma_max``."""
    kap = kappa_fn(eta, k_dither, m_levels)
    smax2 = sigma_max_sq(cfg.r_theta, cfg.r_b, cfg.sigma_w2)
    return QuantizerSpec(m_levels, k_dither, eta, math.sqrt(kap / p_tilde * smax2), p_tilde)


def _receive_modes(cfg):
    lambda_a, v = linalg.hermitian_eig(cfg.r_a)
    return np.clip(lambda_a, 0.0, None), v


def _assemble(cfg, quant, p, lambda_a, v, strategy):
    kap = quant.kappa
    smax2 = sigma_max_sq(cfg.r_theta, cfg.r_b, cfg.sigma_w2)
    sig = np.sqrt(np.clip(p, 0.0, None))
    return CombinerDesign(
        a=build_A(sig, v, cfg.r_a),
        lambda_diag=sig,
        v=v,
        u_rot=linalg.dft_matrix(quant.p_tilde),
        lambda_a=lambda_a,
        kappa=kap,
        beta=beta_param(quant.k_dither, kap, smax2, quant.m_levels, quant.p_tilde),
        sigma_max2=smax2,
        gamma=quant.gamma,
        strategy=strategy,
        quant=quant,
    )


def _allocation_inputs(cfg, quant):
    if quant.p_tilde > cfg.n_rx:
        raise DimensionMismatch(f"P={quant.p_tilde} exceeds N_r={cfg.n_rx}")
    lambda_a, v = _receive_modes(cfg)
    kap = quant.kappa
    smax2 = sigma_max_sq(cfg.r_theta, cfg.r_b, cfg.sigma_w2)
    beta = beta_param(quant.k_dither, kap, smax2, quant.m_levels, quant.p_tilde)
    return lambda_a, v, beta


def design_dd(cfg, theta, quant):
    """Data-dependent design: allocation weighted by ``d_B`` of this signal realization."""
    lambda_a, v, beta = _allocation_inputs(cfg, quant)
    spec = signal_spectrum(cfg.r_b_sqrt, cfg.r_b, theta)
    p = solve_power_allocation(lambda_a[:quant.p_tilde], spec.d_b, spec.eigenvalues, cfg.sigma_w2, beta)
    return _assemble(cfg, quant, p, lambda_a, v, DD)


def saa_spectrum_pool(cfg, n_samples, rng, chunk=2048):
    """
    Pooled eigenvalues over `n_samples` independent signal draws.

    Entry ``(n_s - 1) N_t + n_t`` holds the ``n_t``-th largest eigenvalue of
    draw ``n_s``.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    out = []
    remaining = n_samples
    while remaining:
        n = min(chunk, remaining)
        x = cfg.r_b_sqrt @ sample_signals(cfg, rng, n).conj()
        gram = x @ np.conj(np.swapaxes(x, -1, -2))
        out.append(np.linalg.eigvalsh(gram)[:, ::-1])
        remaining -= n
    return np.concatenate(out, axis=0).reshape(-1)


def design_from_pool(cfg, quant, pool, n_samples):
    lambda_a, v, beta = _allocation_inputs(cfg, quant)
    weights = np.full(pool.size, 1.0 / n_samples)
    p = solve_power_allocation(lambda_a[:quant.p_tilde], weights, pool, cfg.sigma_w2, beta)
    return _assemble(cfg, quant, p, lambda_a, v, DI)


def design_di(cfg, quant, n_samples, rng):
    """Data-independent design from a sample-average approximation over `n_samples` signals."""
    pool = saa_spectrum_pool(cfg, n_samples, rng)
    return design_from_pool(cfg, quant, pool, n_samples)

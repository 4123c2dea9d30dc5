"""
Scenario configuration and random generation of signals, channels and noise.

The sensing model is ``Y = G Theta + W`` with a Kronecker-correlated target
response ``G = R_A^{1/2} G_0 (R_B^{1/2})^T`` and spatially colored receiver
noise. All matrices use column-stacking for ``vec``.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.special

from . import linalg
from .errors import ConfigError, DimensionMismatch

# purpose tags for deterministic substreams
PURPOSES = {
    "signal": 0,
    "channel": 1,
    "noise": 2,
    "dither": 3,
    "saa": 4,
}


def rng_stream(master_seed, *key):
    """
    Independent generator for ``(master_seed, *key)``.

    String entries of `key` are mapped through :data:`PURPOSES`; integers are
    used as-is. The same key always yields the same stream.
    """
    spawn_key = tuple(PURPOSES[k] if isinstance(k, str) else int(k) for k in key)
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(seq))


def complex_normal(rng, shape, var=1.0):
    """Circular complex Gaussian samples; real and imaginary parts have variance ``var / 2``."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    # (re, im) pairs are interleaved so a batch of n draws equals n single draws
    x = rng.standard_normal(shape + (2,))
    return np.sqrt(var / 2.0) * (x[..., 0] + 1j * x[..., 1])


def bessel_j0(x):
    """Zero-order Bessel function of the first kind."""
    return scipy.special.j0(x)


def jakes_correlation(n, spacing):
    """Toeplitz correlation matrix with entries ``J_0(spacing * |n1 - n2|)``."""
    if n < 1 or spacing <= 0:
        raise ValueError("jakes_correlation needs n >= 1 and spacing > 0")
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return bessel_j0(spacing * lags).astype(complex)


@dataclass
class ScenarioConfig:
    """
    Dimensions, correlations and noise level of one sensing scenario.

    ``precoder`` defaults to the identity, so ``R_theta = I``.
    """

    n_tx: int
    n_rx: int
    n_snapshots: int
    r_a: np.ndarray
    r_b: np.ndarray
    sigma_w2: float
    precoder: np.ndarray = None
    master_seed: int = 0
    correlation: dict = field(default=None, repr=False)

    def __post_init__(self):
        self.r_a = np.asarray(self.r_a, dtype=complex)
        self.r_b = np.asarray(self.r_b, dtype=complex)
        if self.precoder is None:
            self.precoder = np.eye(self.n_tx, dtype=complex)
        self.precoder = np.asarray(self.precoder, dtype=complex)
        self.validate()
        self.r_a_sqrt = linalg.psd_sqrt(self.r_a)
        self.r_b_sqrt = linalg.psd_sqrt(self.r_b)
        self.r_theta = self.precoder @ self.precoder.conj().T
        if self.correlation is None:
            self.correlation = {"model": "explicit"}

    def validate(self):
        if min(self.n_tx, self.n_rx, self.n_snapshots) < 1:
            raise ConfigError("dimensions must be positive")
        if self.n_snapshots < self.n_tx:
            raise ConfigError(f"need L >= N_t, got L={self.n_snapshots}, N_t={self.n_tx}")
        if self.r_a.shape != (self.n_rx, self.n_rx):
            raise ConfigError(f"r_a has shape {self.r_a.shape}, expected ({self.n_rx}, {self.n_rx})")
        if self.r_b.shape != (self.n_tx, self.n_tx):
            raise ConfigError(f"r_b has shape {self.r_b.shape}, expected ({self.n_tx}, {self.n_tx})")
        if self.precoder.shape != (self.n_tx, self.n_tx):
            raise ConfigError(f"precoder has shape {self.precoder.shape}")
        if not self.sigma_w2 >= 0:
            raise ConfigError("sigma_w2 must be nonnegative")
        for name in ("r_a", "r_b"):
            m = getattr(self, name)
            try:
                linalg.check_hermitian(m)
            except Exception as exc:
                raise ConfigError(f"{name}: {exc}") from exc
            if np.max(np.abs(np.diag(m) - 1.0)) > 1e-10:
                raise ConfigError(f"{name} must have unit diagonal")

    @classmethod
    def jakes(cls, n_tx, n_rx, n_snapshots, sigma_w2, rx_spacing=np.pi,
              tx_spacing=0.8 * np.pi, precoder=None, master_seed=0):
        return cls(
            n_tx=n_tx, n_rx=n_rx, n_snapshots=n_snapshots,
            r_a=jakes_correlation(n_rx, rx_spacing),
            r_b=jakes_correlation(n_tx, tx_spacing),
            sigma_w2=sigma_w2, precoder=precoder, master_seed=master_seed,
            correlation={"model": "jakes", "rx_spacing": rx_spacing, "tx_spacing": tx_spacing},
        )

    @classmethod
    def reference(cls, master_seed=0):
        """N_t=6, N_r=20, L=40, Jakes spacings (pi, 0.8 pi), sigma_w^2=1e-3."""
        return cls.jakes(6, 20, 40, 1e-3, master_seed=master_seed)

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        return ScenarioConfig.from_dict(d)

    # --- serialization -------------------------------------------------

    def to_dict(self):
        d = {
            "n_tx": self.n_tx,
            "n_rx": self.n_rx,
            "n_snapshots": self.n_snapshots,
            "sigma_w2": self.sigma_w2,
            "master_seed": self.master_seed,
        }
        if self.correlation.get("model") == "jakes":
            d["correlation"] = dict(self.correlation)
        else:
            d["correlation"] = {
                "model": "explicit",
                "r_a": matrix_to_json(self.r_a),
                "r_b": matrix_to_json(self.r_b),
            }
        if np.array_equal(self.precoder, np.eye(self.n_tx)):
            d["precoder"] = "identity"
        else:
            d["precoder"] = matrix_to_json(self.precoder)
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            n_tx, n_rx, n_snap = int(d["n_tx"]), int(d["n_rx"]), int(d["n_snapshots"])
            sigma_w2 = float(d["sigma_w2"])
            corr = d.get("correlation", {"model": "jakes", "rx_spacing": np.pi, "tx_spacing": 0.8 * np.pi})
            precoder = d.get("precoder", "identity")
            precoder = None if precoder == "identity" else matrix_from_json(precoder)
            seed = int(d.get("master_seed", 0))
            model = corr.get("model")
            if model == "jakes":
                return cls.jakes(n_tx, n_rx, n_snap, sigma_w2,
                                 rx_spacing=float(corr["rx_spacing"]),
                                 tx_spacing=float(corr["tx_spacing"]),
                                 precoder=precoder, master_seed=seed)
            if model == "explicit":
                return cls(n_tx, n_rx, n_snap, matrix_from_json(corr["r_a"]),
                           matrix_from_json(corr["r_b"]), sigma_w2,
                           precoder=precoder, master_seed=seed)
            raise ConfigError(f"unknown correlation model {model!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad scenario config: {exc}") from exc

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text())


def matrix_to_json(m):
    """Nested list of ``[re, im]`` pairs."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows):
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ConfigError("complex matrices must be nested arrays of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


@dataclass
class FrameDraw:
    theta: np.ndarray
    g_vec: np.ndarray
    noise: np.ndarray
    y_vec: np.ndarray

    def channel_matrix(self, n_rx):
        return linalg.unvec(self.g_vec, n_rx, self.g_vec.size // n_rx)


def sample_signal(cfg, rng):
    """``Theta = W_pre Theta_0`` with i.i.d. CN(0, 1) entries in ``Theta_0``."""
    theta0 = complex_normal(rng, (cfg.n_tx, cfg.n_snapshots))
    return cfg.precoder @ theta0


def sample_signals(cfg, rng, n):
    """Batch of `n` independent signal matrices, shape ``(n, N_t, L)``."""
    theta0 = complex_normal(rng, (n, cfg.n_tx, cfg.n_snapshots))
    return cfg.precoder @ theta0


def sample_channel(cfg, rng):
    """``g = vec(R_A^{1/2} G_0 (R_B^{1/2})^T)``."""
    g0 = complex_normal(rng, (cfg.n_rx, cfg.n_tx))
    return linalg.vec(cfg.r_a_sqrt @ g0 @ cfg.r_b_sqrt.T)


def sample_noise(cfg, rng):
    """Columns i.i.d. CN(0, sigma_w^2 R_A)."""
    v = complex_normal(rng, (cfg.n_rx, cfg.n_snapshots))
    return np.sqrt(cfg.sigma_w2) * (cfg.r_a_sqrt @ v)


def received_vector(theta, g_vec, noise):
    """``y = (Theta^T kron I_{N_r}) g + vec(W)``, evaluated as ``vec(G Theta + W)``."""
    theta = np.asarray(theta)
    noise = np.asarray(noise)
    n_tx, n_snap = theta.shape
    n_rx = noise.shape[0]
    if noise.shape[1] != n_snap or g_vec.size != n_tx * n_rx:
        raise DimensionMismatch(
            f"theta {theta.shape}, g {g_vec.shape}, noise {noise.shape} do not agree")
    g = linalg.unvec(g_vec, n_rx, n_tx)
    return linalg.vec(g @ theta + noise)


def draw_frame(cfg, trial):
    """Frame for Monte Carlo trial `trial`; reproducible from ``cfg.master_seed``."""
    seed = cfg.master_seed
    theta = sample_signal(cfg, rng_stream(seed, trial, "signal"))
    g_vec = sample_channel(cfg, rng_stream(seed, trial, "channel"))
    noise = sample_noise(cfg, rng_stream(seed, trial, "noise"))
    return FrameDraw(theta, g_vec, noise, received_vector(theta, g_vec, noise))

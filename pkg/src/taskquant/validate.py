"""Small-scale self checks behind the ``validate`` subcommand."""

import itertools

import numpy as np

from . import channel, design, linalg, quantizer
from .errors import Infeasible


def _rand_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rand_psd(rng, n):
    x = _rand_complex(rng, n, n)
    return x @ x.conj().T + 0.1 * np.eye(n)


def check_kron(rng):
    a, b, c, d = (_rand_complex(rng, 2, 2) for _ in range(4))
    lhs = linalg.kron(a, b) @ linalg.kron(c, d)
    return np.max(np.abs(lhs - linalg.kron(a @ c, b @ d))) < 1e-12


def check_eig_svd(rng):
    m = _rand_complex(rng, 16, 16)
    h = m + m.conj().T
    w, v = linalg.hermitian_eig(h)
    ok_eig = np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) / np.linalg.norm(h) < 1e-9
    x = _rand_complex(rng, 6, 9)
    u, s, vv = linalg.svd(x)
    sig = np.zeros((6, 9))
    sig[:6, :6] = np.diag(s)
    ok_svd = np.linalg.norm(u @ sig @ vv.conj().T - x) / np.linalg.norm(x) < 1e-9
    return ok_eig and ok_svd and np.all(np.diff(w) <= 0) and np.all(np.diff(s) <= 0)


def check_dft(rng):
    u = linalg.dft_matrix(8)
    d = np.diag(rng.uniform(0, 3, 8))
    rot = u @ d @ u.conj().T
    return (np.max(np.abs(u @ u.conj().T - np.eye(8))) < 1e-12
            and np.max(np.abs(np.diag(rot) - np.mean(np.diag(d)))) < 1e-12)


def check_psd_sqrt(rng):
    r = _rand_psd(rng, 6)
    s = linalg.psd_sqrt(r)
    return np.linalg.norm(s @ s.conj().T - r) / np.linalg.norm(r) < 1e-9


def check_allocation(rng):
    for _ in range(5):
        lam_a = np.sort(rng.uniform(0.1, 3, 3))[::-1]
        w = rng.uniform(0.2, 1.5, 2)
        lam = rng.uniform(0.5, 20, 2)
        beta = rng.uniform(0.05, 1.0)
        p = design.solve_power_allocation(lam_a, w, lam, 0.1, beta)
        best = -np.inf
        grid = np.linspace(0, 1, 201)
        for p1, p2 in itertools.product(grid, grid):
            if p1 + p2 <= 1:
                best = max(best, design.allocation_objective(
                    np.array([p1, p2, 1 - p1 - p2]), lam_a, w, lam, 0.1, beta))
        if design.allocation_objective(p, lam_a, w, lam, 0.1, beta) < best - 1e-9:
            return False
        if design.kkt_residual(p, lam_a, w, lam, 0.1, beta) > 1e-8:
            return False
    return True


def check_feasibility_boundary(rng):
    for p in range(1, 21):
        m = quantizer.resolution_from_budget(2, 20, 40, p)
        feasible = quantizer.is_feasible(2.0, 2, m)
        if feasible != (p / 20 <= 0.6):
            return False
    return True


def check_dither_noise(rng):
    spec = quantizer.QuantizerSpec(8, 2, 2.0, 1.0, 1)
    x = 0.25 * channel.complex_normal(rng, 200_000)
    z = quantizer.quantize_vector(x, spec, rng)
    err = z - x
    target = quantizer.quantization_noise_variance(spec)
    return abs(np.mean(np.abs(err) ** 2) / target - 1) < 0.03


def check_predicted_mse(rng):
    cfg = channel.ScenarioConfig.jakes(2, 3, 4, 0.1, rx_spacing=2.0, tx_spacing=2.5)
    theta = channel.sample_signal(cfg, rng)
    try:
        q = design.make_quantizer(cfg, 8, 2, 2.0, 2)
    except Infeasible:
        return False
    d = design.design_dd(cfg, theta, q)
    direct = design.predicted_mse(d.a, theta, cfg.r_a, cfg.r_b, cfg.sigma_w2, q.gamma, 2, 8)
    fast = d.estimator(cfg, theta).mse()
    return abs(direct - fast) < 1e-10 * max(1.0, abs(direct))


CHECKS = [
    ("kron mixed product", check_kron),
    ("eig/svd reconstruction", check_eig_svd),
    ("dft equal diagonal", check_dft),
    ("psd_sqrt defining property", check_psd_sqrt),
    ("power allocation vs grid search", check_allocation),
    ("feasibility boundary r <= 0.6", check_feasibility_boundary),
    ("dithered quantizer noise variance", check_dither_noise),
    ("predicted MSE direct vs structured", check_predicted_mse),
]


def run_all(seed=0, out=print):
    rng = np.random.default_rng(seed)
    ok = True
    for name, fn in CHECKS:
        passed = bool(fn(rng))
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok

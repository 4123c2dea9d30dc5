"""
Dense complex linear algebra helpers.

Thin wrappers over numpy/scipy that fix the conventions the rest of the
package relies on: eigenvalues and singular values are always returned in
descending order, square roots are Hermitian (eigendecomposition based), and
near-PSD inputs are clamped at ``1e-10 * lambda_max``.
"""

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, NonHermitian, NotPSD, Singular

HERMITIAN_TOL = 1e-10
PSD_REL_TOL = 1e-10
COND_FLOOR = 1e-14


def hermitian_part(m):
    """Return ``(m + m^H) / 2``."""
    m = np.asarray(m)
    return 0.5 * (m + m.conj().T)


def check_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitian(f"expected a square matrix, got shape {m.shape}")
    err = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if err > tol:
        raise NonHermitian(f"max |M - M^H| = {err:.3e} exceeds {tol:.1e}")


def kron(a, b):
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def hermitian_eig(m, tol=HERMITIAN_TOL):
    """
    Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : (n, n) array_like
        Hermitian matrix (checked to within `tol` per entry).

    Returns
    -------
    values : (n,) ndarray
        Real eigenvalues in descending order.
    vectors : (n, n) ndarray
        Unitary matrix whose columns are the matching eigenvectors, so that
        ``m = vectors @ diag(values) @ vectors^H``.
    """
    m = np.asarray(m)
    check_hermitian(m, tol)
    values, vectors = np.linalg.eigh(hermitian_part(m))
    # eigh returns ascending order; a stable flip keeps ties deterministic
    return values[::-1].copy(), vectors[:, ::-1].copy()


def _clamped_eig(m):
    values, vectors = hermitian_eig(m)
    lam_max = max(values[0], 0.0) if values.size else 0.0
    if values.size and values[-1] < -PSD_REL_TOL * lam_max:
        raise NotPSD(f"eigenvalue {values[-1]:.3e} below -{PSD_REL_TOL:.0e}*lambda_max")
    # eigenvalues inside the +-tol band are round-off of exact zeros
    values = np.where(values > PSD_REL_TOL * lam_max, values, 0.0)
    return values, vectors, lam_max


def psd_sqrt(m):
    """
    Hermitian square root ``V diag(sqrt(lambda)) V^H``.

    Eigenvalues within ``1e-10 * lambda_max`` of zero are set to zero.
    """
    values, vectors, _ = _clamped_eig(m)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def psd_inv_sqrt(m, rel_tol=PSD_REL_TOL):
    """
    Pseudo-inverse Hermitian square root.

    Eigenvalues below ``rel_tol * lambda_max`` map to zero, the rest to
    ``lambda ** -0.5``.
    """
    values, vectors, lam_max = _clamped_eig(m)
    keep = values > rel_tol * lam_max
    inv = np.zeros_like(values)
    inv[keep] = values[keep] ** -0.5
    return (vectors * inv) @ vectors.conj().T


def svd(m):
    """
    Full SVD ``m = u @ Sigma @ v^H`` with descending singular values.

    Returns ``(u, s, v)`` where `v` (not ``v^H``) is returned.
    """
    m = np.asarray(m)
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return u, s, vh.conj().T


def dft_matrix(p):
    """Unitary DFT matrix with entry ``(p, q) = exp(-2j*pi*p*q/P) / sqrt(P)``."""
    if p < 1:
        raise ValueError("DFT size must be at least 1")
    idx = np.arange(p)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / p) / np.sqrt(p)


def solve_hermitian(m, rhs):
    """Solve ``m x = rhs`` for Hermitian positive definite `m`."""
    m = np.asarray(m)
    check_hermitian(m, tol=HERMITIAN_TOL * max(1.0, np.max(np.abs(m), initial=0.0)))
    values = np.linalg.eigvalsh(hermitian_part(m))
    if values.size and (values[-1] <= 0 or values[0] < COND_FLOOR * values[-1]):
        raise Singular(f"eigenvalue range [{values[0]:.3e}, {values[-1]:.3e}] fails the conditioning check")
    try:
        return scipy.linalg.solve(hermitian_part(m), rhs, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise Singular(str(exc)) from exc


def vec(m):
    """Column-stacking vectorization."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, rows, cols):
    return np.asarray(v).reshape((rows, cols), order="F")

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taskquant import linalg
from taskquant.errors import NonHermitian, NotPSD, Singular

from conftest import rand_complex, rand_psd


def test_kron_scalar_and_identity(rng):
    np.testing.assert_array_equal(linalg.kron(np.array([[2.0]]), np.eye(2)), 2 * np.eye(2))
    m = rand_complex(rng, 3, 2)
    np.testing.assert_array_equal(linalg.kron(np.eye(1), m), m)


def test_kron_block_layout(rng):
    a, b = rand_complex(rng, 2, 3), rand_complex(rng, 4, 2)
    k = linalg.kron(a, b)
    assert k.shape == (8, 6)
    for i in range(2):
        for j in range(3):
            np.testing.assert_allclose(k[4 * i:4 * i + 4, 2 * j:2 * j + 2], a[i, j] * b)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_kron_mixed_product_and_bilinearity(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (rand_complex(rng, 2, 2) for _ in range(4))
    np.testing.assert_allclose(linalg.kron(a, b) @ linalg.kron(c, d), linalg.kron(a @ c, b @ d), atol=1e-12)
    s = complex(rng.standard_normal(), rng.standard_normal())
    np.testing.assert_allclose(linalg.kron(a + s * c, b), linalg.kron(a, b) + s * linalg.kron(c, b), atol=1e-12)


def test_hermitian_eig_trivial():
    w, v = linalg.hermitian_eig(np.eye(3))
    np.testing.assert_allclose(w, [1, 1, 1])
    w, v = linalg.hermitian_eig(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(w, [3, 1])
    np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("n", [5, 17, 64])
def test_hermitian_eig_reconstruction(rng, n):
    m = rand_complex(rng, n, n)
    h = m + m.conj().T
    w, v = linalg.hermitian_eig(h)
    assert np.all(np.diff(w) <= 0)
    np.testing.assert_allclose(np.linalg.norm(v, axis=0), 1, atol=1e-12)
    err = np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) / np.linalg.norm(h)
    assert err < 1e-9


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        linalg.hermitian_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_psd_sqrt_examples(rng):
    np.testing.assert_allclose(linalg.psd_sqrt(np.eye(4)), np.eye(4), atol=1e-14)
    np.testing.assert_allclose(linalg.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]), atol=1e-14)
    r = rand_psd(rng, 7)
    s = linalg.psd_sqrt(r)
    assert np.linalg.norm(s @ s.conj().T - r) / np.linalg.norm(r) < 1e-9
    np.testing.assert_allclose(s, s.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(s).min() >= -1e-10


def test_psd_sqrt_clamps_tiny_negative_and_rejects_negative():
    m = np.diag([1.0, -1e-13])
    np.testing.assert_allclose(linalg.psd_sqrt(m), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSD):
        linalg.psd_sqrt(np.diag([1.0, -1e-3]))


def test_psd_inv_sqrt(rng):
    np.testing.assert_allclose(linalg.psd_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(linalg.psd_inv_sqrt(np.diag([4.0, 0.0])), np.diag([0.5, 0.0]))
    r = rand_psd(rng, 6)
    np.testing.assert_allclose(linalg.psd_inv_sqrt(r) @ linalg.psd_sqrt(r), np.eye(6), atol=1e-8)


@pytest.mark.parametrize("shape", [(4, 6), (6, 4), (64, 64)])
def test_svd_reconstruction(rng, shape):
    m = rand_complex(rng, *shape)
    u, s, v = linalg.svd(m)
    sig = np.zeros(shape)
    k = min(shape)
    sig[:k, :k] = np.diag(s)
    assert np.linalg.norm(u @ sig @ v.conj().T - m) / np.linalg.norm(m) < 1e-9
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


def test_svd_trivial():
    np.testing.assert_allclose(linalg.svd(np.diag([3.0, 1.0]))[1], [3, 1])
    np.testing.assert_allclose(linalg.svd(np.zeros((2, 3)))[1], [0, 0])


def test_dft_matrix():
    np.testing.assert_allclose(linalg.dft_matrix(1), [[1]])
    np.testing.assert_allclose(linalg.dft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    with pytest.raises(ValueError):
        linalg.dft_matrix(0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 16), st.integers(0, 2**32 - 1))
def test_dft_unitary_and_equalizes_diagonal(p, seed):
    u = linalg.dft_matrix(p)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(p), atol=1e-12)
    d = np.random.default_rng(seed).uniform(-2, 5, p)
    rot = u @ np.diag(d) @ u.conj().T
    np.testing.assert_allclose(np.diag(rot), np.full(p, d.mean()), atol=1e-12)


def test_solve_hermitian(rng):
    b = rand_complex(rng, 4, 2)
    np.testing.assert_allclose(linalg.solve_hermitian(np.eye(4), b), b)
    np.testing.assert_allclose(linalg.solve_hermitian(2 * np.eye(4), b), b / 2)
    m = rand_psd(rng, 8, ridge=1.0)
    rhs = rand_complex(rng, 8, 3)
    x = linalg.solve_hermitian(m, rhs)
    assert np.linalg.norm(m @ x - rhs) / np.linalg.norm(rhs) < 1e-8


def test_solve_hermitian_rejects_singular():
    with pytest.raises(Singular):
        linalg.solve_hermitian(np.diag([1.0, 1e-16]), np.ones(2))


def test_vec_is_column_stacking():
    m = np.arange(6).reshape(2, 3)
    np.testing.assert_array_equal(linalg.vec(m), [0, 3, 1, 4, 2, 5])
    np.testing.assert_array_equal(linalg.unvec(linalg.vec(m), 2, 3), m)

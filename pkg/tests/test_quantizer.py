import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from taskquant import quantizer
from taskquant.channel import complex_normal
from taskquant.errors import Infeasible, ResolutionTooLow
from taskquant.quantizer import QuantizerSpec


def test_resolution_examples():
    assert quantizer.resolution_from_budget(2, 20, 40, 12) == 3      # floor(2**(5/3))
    assert quantizer.resolution_from_budget(2, 20, 40, 13) == 2
    assert not quantizer.is_feasible(2.0, 2, 2)
    assert quantizer.resolution_from_budget(2, 20, 40, 20, "paper-literal") == 4
    assert quantizer.resolution_from_budget(4, 20, 40, 20) == 4
    assert quantizer.resolution_from_budget(16, 20, 40, 20) == 256


def test_resolution_too_low():
    with pytest.raises(ResolutionTooLow):
        quantizer.resolution_from_budget(1, 4, 10, 8)
    with pytest.raises(ValueError):
        quantizer.resolution_from_budget(2, 4, 10, 2, "bogus")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16), st.integers(1, 32), st.integers(1, 32), st.sampled_from(quantizer.CONVENTIONS))
def test_resolution_nonincreasing_in_adcs(rate, n_rx, p, conv):
    def m(pp):
        try:
            return quantizer.resolution_from_budget(rate, n_rx, 40, pp, conv)
        except ResolutionTooLow:
            return 0
    assert m(p + 1) <= m(p)


def test_kappa_values():
    assert quantizer.kappa(2.0, 0, 2) == 4.0
    assert math.isclose(quantizer.kappa(2.0, 2, 3), 108 / 11, rel_tol=1e-14)
    with pytest.raises(Infeasible):
        quantizer.kappa(2.0, 2, 2)


@pytest.mark.parametrize("k_dither", [1, 2, 3])
def test_kappa_feasibility_threshold(k_dither):
    m = 10
    edge = math.sqrt(3 / (2 * k_dither)) * m
    assert quantizer.is_feasible(edge * (1 - 1e-9), k_dither, m)
    assert not quantizer.is_feasible(edge * (1 + 1e-9), k_dither, m)


def test_support_from_combiner():
    assert quantizer.support_from_combiner(4.0, 1.0, np.eye(1)) == 2.0
    assert math.isclose(quantizer.support_from_combiner(1.0, 1.0, np.diag([0.5, 0.25])), math.sqrt(0.5))


def test_spec_invariants():
    spec = QuantizerSpec(6, 2, 2.0, 1.5, 4)
    assert spec.delta * spec.m_levels == pytest.approx(2 * spec.gamma, abs=0)
    np.testing.assert_allclose(np.diff(spec.levels), spec.delta)
    with pytest.raises(ResolutionTooLow):
        QuantizerSpec(1, 0, 2.0, 1.0, 1)


def test_uniform_quantize_examples():
    assert quantizer.uniform_quantize(0.1, 1.0, 4) == 0.25
    assert quantizer.uniform_quantize(-0.9, 1.0, 4) == -0.75
    assert quantizer.uniform_quantize(5.0, 1.0, 4) == 0.75
    assert quantizer.uniform_quantize(-5.0, 1.0, 4) == -0.75
    # boundary alpha = gamma falls in the top cell
    assert quantizer.uniform_quantize(1.0, 1.0, 4) == 0.75
    assert quantizer.uniform_quantize(0.0, 1.0, 3) == 0.0


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 33), st.floats(0.1, 10), st.lists(st.floats(-50, 50), min_size=2, max_size=40))
def test_uniform_quantize_properties(m, gamma, xs):
    xs = np.sort(np.array(xs))
    q = quantizer.uniform_quantize(xs, gamma, m)
    delta = 2 * gamma / m
    assert np.all(np.diff(q) >= 0)
    assert np.all(np.abs(q) <= gamma - delta / 2 + 1e-12)
    levels = -gamma + delta * (np.arange(m) + 0.5)
    np.testing.assert_allclose(quantizer.uniform_quantize(levels, gamma, m), levels, atol=1e-12)


def test_no_dither_reduces_to_plain_quantizer(rng):
    spec = QuantizerSpec(4, 0, 2.0, 1.0, 1)
    x = 0.3 - 0.6j
    z = quantizer.dithered_quantize(x, spec, rng)
    assert z == quantizer.uniform_quantize(0.3, 1, 4) + 1j * quantizer.uniform_quantize(-0.6, 1, 4)


def test_dither_consumption_is_reproducible():
    spec = QuantizerSpec(8, 2, 2.0, 1.0, 1)
    u = np.linspace(-0.5, 0.5, 7) * (1 + 1j)
    a = quantizer.quantize_vector(u, spec, np.random.default_rng(3))
    b = quantizer.quantize_vector(u, spec, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)
    # element i uses the i-th block of 2*K_d uniforms
    rng = np.random.default_rng(3)
    xi = rng.uniform(-spec.delta / 2, spec.delta / 2, size=(7, 2, 2)).sum(-1)
    expected = (quantizer.uniform_quantize(u.real + xi[:, 0], 1.0, 8)
                + 1j * quantizer.uniform_quantize(u.imag + xi[:, 1], 1.0, 8))
    np.testing.assert_array_equal(a, expected)


def _in_range_gaussian(rng, n, sigma, bound):
    x = sigma * (rng.standard_normal(2 * n) + 1j * rng.standard_normal(2 * n))
    x = x[(np.abs(x.real) <= bound) & (np.abs(x.imag) <= bound)]
    return x[:n]


def test_dithered_noise_white_and_matches_variance():
    rng = np.random.default_rng(7)
    spec = QuantizerSpec(8, 2, 2.0, 1.0, 1)
    # input plus dither stays inside [-gamma, gamma]
    x = _in_range_gaussian(rng, 1_000_000, 0.25, spec.gamma - spec.k_dither * spec.delta / 2)
    err = quantizer.quantize_vector(x, spec, rng) - x
    var = np.mean(np.abs(err) ** 2)
    assert abs(var / quantizer.quantization_noise_variance(spec) - 1) < 0.02
    for part in (np.real, np.imag):
        assert abs(np.corrcoef(part(x), part(err))[0, 1]) < 0.01
    rho = abs(np.mean(err * x.conj())) / math.sqrt(var * np.mean(np.abs(x) ** 2))
    assert rho < 0.01


def test_quantize_vector_codomain_and_empty(rng):
    spec = QuantizerSpec(5, 1, 2.0, 1.3, 1)
    assert quantizer.quantize_vector(np.array([], dtype=complex), spec, rng).size == 0
    z = quantizer.quantize_vector(3 * complex_normal(rng, 500), spec, rng)
    levels = spec.levels
    for part in (z.real, z.imag):
        assert np.all(np.min(np.abs(part[:, None] - levels[None, :]), axis=1) < 1e-12)


def test_overload_fraction_gaussian_tail():
    rng = np.random.default_rng(8)
    # unit variance per real dimension, support two standard deviations
    spec = QuantizerSpec(4, 0, 2.0, 2.0, 1)
    u = rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000)
    frac = quantizer.overload_fraction(quantizer.dithered_input(u, spec, rng), spec.gamma)
    tail = math.erfc(2 / math.sqrt(2))
    assert abs(tail - 0.0455) < 1e-3
    assert abs(frac - tail) < 4 * math.sqrt(tail * (1 - tail) / 400_000)


def test_quantization_noise_variance_values():
    assert quantizer.quantization_noise_variance(QuantizerSpec(4, 2, 2.0, 1.0, 1)) == pytest.approx(0.125)
    assert quantizer.quantization_noise_variance(QuantizerSpec(2, 0, 2.0, 1.0, 1)) == pytest.approx(1 / 6)
    a = quantizer.quantization_noise_variance(QuantizerSpec(7, 1, 2.0, 0.8, 1))
    b = quantizer.quantization_noise_variance(QuantizerSpec(7, 1, 2.0, 1.6, 1))
    assert b == pytest.approx(4 * a)

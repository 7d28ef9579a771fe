"""Adaptive Simpson oracle: convergence, orientation, and kernel mass."""

import math

import mpmath
import numpy as np
import pytest

from thzook.quadrature import adaptive_simpson, gaussian_power_integral


class TestAdaptiveSimpson:
    def test_polynomial_exactness(self):
        """Cubic integrands are exact for Simpson before any refinement."""
        val = adaptive_simpson(lambda x: x**3 - 2 * x + 1, 0.0, 2.0, scale=1.0)
        assert val == pytest.approx(4.0 - 4.0 + 2.0, abs=1e-14)

    def test_empty_interval(self):
        assert adaptive_simpson(math.sin, 1.0, 1.0, scale=1.0) == 0.0

    def test_reversed_bounds_flip_sign(self):
        fwd = adaptive_simpson(math.exp, 0.0, 1.0, scale=1.0)
        rev = adaptive_simpson(math.exp, 1.0, 0.0, scale=1.0)
        assert rev == -fwd

    def test_oscillatory_integrand(self):
        val = adaptive_simpson(math.sin, 0.0, math.pi, scale=2.0)
        np.testing.assert_allclose(val, 2.0, rtol=1e-13)

    def test_against_mpmath_on_random_gaussians(self):
        """Agreement with 50-digit quadrature on randomized Gaussian kernels."""
        rng = np.random.default_rng(314)
        mpmath.mp.dps = 50
        for _ in range(20):
            c = rng.uniform(-2.0, 2.0)
            s = rng.uniform(0.3, 2.0)
            a = c + rng.uniform(-4.0, 0.0) * s
            b = c + rng.uniform(0.0, 4.0) * s

            def f(v, c=c, s=s):
                return math.exp(-(((v - c) / s) ** 2))

            got = adaptive_simpson(f, a, b, scale=s * math.sqrt(math.pi))
            want = float(
                mpmath.quad(lambda v: mpmath.exp(-(((v - c) / s) ** 2)), [a, c, b])
            )
            np.testing.assert_allclose(got, want, rtol=2e-13)

    def test_scale_must_be_positive(self):
        with pytest.raises(ValueError):
            adaptive_simpson(math.sin, 0.0, 1.0, scale=0.0)
        with pytest.raises(ValueError):
            adaptive_simpson(math.sin, 0.0, 1.0, scale=-1.0)


class TestGaussianPowerIntegral:
    def test_total_mass(self):
        """Integrating +-8 sigma recovers P_a/(sqrt(pi) sigma)."""
        sigma, pa = 0.7, 2.0
        got = gaussian_power_integral(-8 * sigma, 8 * sigma, 0.0, sigma, pa)
        np.testing.assert_allclose(got, pa / (math.sqrt(math.pi) * sigma), rtol=1e-12)

    def test_half_mass_split(self):
        sigma = 1.3
        left = gaussian_power_integral(-9 * sigma, 0.5, 0.5, sigma, 1.0)
        right = gaussian_power_integral(0.5, 0.5 + 9 * sigma, 0.5, sigma, 1.0)
        np.testing.assert_allclose(left, right, rtol=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            s = rng.uniform(0.2, 2.0)
            a, b = np.sort(rng.uniform(-3.0, 3.0, size=2))
            shift = rng.uniform(-5.0, 5.0)
            v0 = gaussian_power_integral(a, b, 0.3, s, 1.0)
            v1 = gaussian_power_integral(a + shift, b + shift, 0.3 + shift, s, 1.0)
            np.testing.assert_allclose(v0, v1, rtol=1e-11)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            gaussian_power_integral(0.0, 1.0, 0.0, 0.0, 1.0)

import math

import mpmath as mp
import numpy as np
from django.test import SimpleTestCase

from charfn.characteristic import cumulants
from charfn.params import Cumulants, VarianceGammaParams
from common.exceptions import DegenerateRangeError, ParameterError

from .coefficients import density_coefficients, put_coefficients, vk_split_terms
from .truncation import model_range, truncation_range


class TruncationRangeTestCase(SimpleTestCase):
    """Test cases for the cumulant truncation rule."""

    def test_symmetric_range(self):
        trange = truncation_range(Cumulants(c1=0.0, c2=1.0, c4=0.0), L=10.0, M=64)
        self.assertEqual((trange.a, trange.b), (-10.0, 10.0))
        self.assertEqual(trange.width, 20.0)

    def test_fourth_cumulant_widens_range(self):
        c = Cumulants(c1=0.1, c2=0.04, c4=0.0016)
        trange = truncation_range(c, L=2.0, M=16)
        half = 2.0 * math.sqrt(0.04 + 0.04)
        self.assertAlmostEqual(trange.a, 0.1 - half, places=15)
        self.assertAlmostEqual(trange.b, 0.1 + half, places=15)

    def test_model_range_uses_model_cumulants(self):
        model = VarianceGammaParams(theta=1.5, nu=0.2, sigma=1.0)
        c = cumulants(model, 1.0)
        trange = model_range(model, 1.0, 10.0, 1024)
        self.assertAlmostEqual((trange.a + trange.b) / 2, c.c1, places=12)
        self.assertEqual(trange.M, 1024)
        self.assertEqual(trange.cumulants, c)

    def test_frequencies(self):
        trange = truncation_range(Cumulants(c1=0.0, c2=1.0), L=1.0, M=4)
        np.testing.assert_allclose(trange.frequencies(), np.arange(4) * math.pi / 2.0)

    def test_contains_is_strict(self):
        trange = truncation_range(Cumulants(c1=0.0, c2=1.0), L=1.0, M=4)
        np.testing.assert_array_equal(trange.contains([-1.0, -0.5, 0.0, 0.999, 1.0]), [False, True, True, True, False])

    def test_invalid_inputs(self):
        c = Cumulants(c1=0.0, c2=1.0)
        with self.assertRaises(ParameterError) as ctx:
            truncation_range(c, L=0.0, M=8)
        self.assertEqual(ctx.exception.field, 'L')
        with self.assertRaises(ParameterError) as ctx:
            truncation_range(c, L=1.0, M=1)
        self.assertEqual(ctx.exception.field, 'M')

    def test_degenerate_range(self):
        with self.assertRaises(DegenerateRangeError):
            truncation_range(Cumulants(c1=0.3, c2=0.0, c4=0.0), L=10.0, M=8)


class PayoffCoefficientTestCase(SimpleTestCase):
    """Payoff coefficients against numerical quadrature."""

    def setUp(self):
        self.trange = truncation_range(Cumulants(c1=-0.02, c2=0.04, c4=0.0), L=8.0, M=32)

    def test_put_coefficients(self):
        a, b = self.trange.a, self.trange.b
        u = put_coefficients(self.trange).values
        for k in (0, 1, 2, 7, 31):
            eta = k * mp.pi / (b - a)
            expected = 2 / (b - a) * mp.quad(lambda y: (1 - mp.exp(y)) * mp.cos(eta * (y - a)), [a, 0])
            with self.subTest(k=k):
                self.assertAlmostEqual(u[k], float(expected), places=13)

    def test_split_terms_rebuild_strike_embedded_coefficients(self):
        a, b = self.trange.a, self.trange.b
        width = b - a
        forward = 100.0
        factors, residuals = vk_split_terms(self.trange)
        self.assertEqual(factors[0], 0)
        self.assertAlmostEqual(residuals[0], math.exp(a) / width, places=15)
        for x in (-0.4, 0.0, 0.25):
            strike = forward * math.exp(x)
            for k in (1, 2, 9, 31):
                eta = k * math.pi / width
                expected = 2 / width * mp.quad(
                    lambda y: (strike - forward * mp.exp(y)) * mp.cos(eta * (y - a)), [a, x]
                )
                split = 2 * strike * (factors[k] * np.exp(-1j * eta * (x - a))).real + forward * residuals[k]
                with self.subTest(x=x, k=k):
                    self.assertAlmostEqual(split, float(expected), places=11)

    def test_density_coefficients(self):
        values = density_coefficients(self.trange)
        np.testing.assert_array_equal(values, np.full(32, 2.0 / self.trange.width))

    def test_arrays_are_read_only(self):
        u = put_coefficients(self.trange).values
        factors, residuals = vk_split_terms(self.trange)
        for array in (u, factors, residuals, density_coefficients(self.trange)):
            with self.assertRaises(ValueError):
                array[0] = 1.0

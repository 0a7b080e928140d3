import math

import mpmath as mp
import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import solve_ivp

from common.exceptions import MarketError, ParameterError

from .characteristic import charfn_eval, charfn_eval_batch, cumulants
from .params import (
    BlackScholesParams,
    HestonParams,
    MarketInputs,
    VarianceGammaParams,
    build_model,
)

BS = BlackScholesParams(sigma=0.2)
VG = VarianceGammaParams(theta=-0.1436, nu=0.3, sigma=0.12136)
HESTON = HestonParams(kappa=1.0, theta=0.1, sigma=1.0, v0=0.1, rho=-0.9)
MODELS = (BS, VG, HESTON)


def vg_mp(model, maturity, z):
    z = mp.mpc(z)
    theta, nu, sigma = mp.mpf(model.theta), mp.mpf(model.nu), mp.mpf(model.sigma)
    omega = mp.log(1 - theta * nu - sigma ** 2 * nu / 2) / nu
    base = 1 - 1j * z * nu * theta + sigma ** 2 * nu * z ** 2 / 2
    return base ** (-maturity / nu) * mp.exp(1j * z * omega * maturity)


def heston_mp(model, maturity, z):
    z = mp.mpc(z)
    kappa, theta, sigma, v0, rho = (mp.mpf(v) for v in (model.kappa, model.theta, model.sigma, model.v0, model.rho))
    T = mp.mpf(maturity)
    beta = kappa - 1j * rho * sigma * z
    d = mp.sqrt(beta ** 2 + (z ** 2 + 1j * z) * sigma ** 2)
    g = (beta - d) / (beta + d)
    e = mp.exp(-d * T)
    variance_term = v0 / sigma ** 2 * (1 - e) / (1 - g * e) * (beta - d)
    mean_term = kappa * theta / sigma ** 2 * ((beta - d) * T - 2 * mp.log((1 - g * e) / (1 - g)))
    return mp.exp(variance_term + mean_term)


def log_cumulant(func, order):
    """``(-i)^n d^n/dz^n log phi(z)`` at zero."""
    with mp.workdps(40):
        derivative = mp.diff(lambda z: mp.log(func(z)), 0, order)
        return float(mp.re((-1j) ** order * derivative))


class CharacteristicFunctionTestCase(SimpleTestCase):
    """Test cases for the normalized characteristic functions."""

    def test_unit_at_zero(self):
        for model in MODELS:
            with self.subTest(model=model.name):
                self.assertAlmostEqual(abs(charfn_eval(model, 1.0, 0.0) - 1.0), 0.0, places=15)

    def test_hermitian_symmetry(self):
        z = np.random.default_rng(11).uniform(-100.0, 100.0, 1000)
        for model in MODELS:
            for maturity in (0.1, 2.0):
                with self.subTest(model=model.name, maturity=maturity):
                    np.testing.assert_allclose(
                        charfn_eval_batch(model, maturity, -z), np.conj(charfn_eval_batch(model, maturity, z)),
                        rtol=0, atol=1e-13,
                    )

    def test_scalar_matches_batch(self):
        z = np.array([0.0, 0.7, 1.3, 12.5])
        for model in MODELS:
            batch = charfn_eval_batch(model, 0.5, z)
            for index, value in enumerate(z):
                with self.subTest(model=model.name, z=value):
                    np.testing.assert_allclose(charfn_eval(model, 0.5, value), batch[index], rtol=1e-15)

    def test_batch_keeps_shape_and_dtype(self):
        z = np.linspace(0.0, 3.0, 12).reshape(3, 4)
        values = charfn_eval_batch(HESTON, 1.0, z)
        self.assertEqual(values.shape, (3, 4))
        self.assertEqual(values.dtype, np.complex128)

    def test_black_scholes_closed_form(self):
        z = np.array([0.5, 2.0, 7.0])
        expected = np.exp(-0.5 * 0.04 * (1j * z + z * z))
        np.testing.assert_allclose(charfn_eval_batch(BS, 1.0, z), expected, rtol=1e-15)

    def test_variance_gamma_matches_high_precision(self):
        for z in (0.3, 4.0, 55.0, 400.0):
            for maturity in (0.1, 1.0):
                with self.subTest(z=z, maturity=maturity):
                    expected = complex(vg_mp(VG, maturity, z))
                    np.testing.assert_allclose(charfn_eval(VG, maturity, z), expected, rtol=1e-12)

    def test_heston_matches_riccati_ode(self):
        kappa, theta, sigma, v0, rho = 1.0, 0.1, 1.0, 0.1, -0.9
        for z in (0.5, 1.0, 5.0, 10.0):
            def rhs(t, y, z=z):
                a, b = y
                db = -0.5 * (z * z + 1j * z) - (kappa - 1j * rho * sigma * z) * b + 0.5 * sigma ** 2 * b * b
                return [kappa * theta * b, db]

            solution = solve_ivp(rhs, (0.0, 2.0), [0j, 0j], method='DOP853', rtol=1e-12, atol=1e-13)
            a, b = solution.y[:, -1]
            expected = np.exp(a + b * v0)
            with self.subTest(z=z):
                np.testing.assert_allclose(charfn_eval(HESTON, 2.0, z), expected, rtol=1e-8)

    def test_heston_stable_at_large_frequency(self):
        values = charfn_eval_batch(HESTON, 2.0, np.linspace(-1e4, 1e4, 40001))
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertLessEqual(np.max(np.abs(values)), 1.0 + 1e-12)

    def test_invalid_maturity(self):
        with self.assertRaises(ParameterError) as ctx:
            charfn_eval(BS, 0.0, 1.0)
        self.assertEqual(ctx.exception.field, 'maturity')

    def test_non_finite_frequency(self):
        with self.assertRaises(ParameterError) as ctx:
            charfn_eval_batch(BS, 1.0, [1.0, np.nan])
        self.assertEqual(ctx.exception.field, 'z')


class CumulantTestCase(SimpleTestCase):
    """Analytic cumulants against derivatives of log phi."""

    def test_black_scholes(self):
        c = cumulants(BS, 2.0)
        self.assertAlmostEqual(c.c1, -0.04)
        self.assertAlmostEqual(c.c2, 0.08)
        self.assertEqual(c.c4, 0.0)

    def test_variance_gamma(self):
        for model, maturity in ((VG, 1.0), (VG, 0.1), (VarianceGammaParams(theta=1.5, nu=0.2, sigma=1.0), 1.0)):
            c = cumulants(model, maturity)
            with self.subTest(model=model, maturity=maturity):
                func = lambda z: vg_mp(model, maturity, z)  # noqa: E731
                self.assertAlmostEqual(c.c1 / log_cumulant(func, 1), 1.0, places=9)
                self.assertAlmostEqual(c.c2 / log_cumulant(func, 2), 1.0, places=9)
                self.assertAlmostEqual(c.c4 / log_cumulant(func, 4), 1.0, places=7)

    def test_heston(self):
        away_from_mean = HestonParams(kappa=2.5, theta=0.04, sigma=0.6, v0=0.09, rho=-0.4)
        for model, maturity in ((HESTON, 2.0), (HESTON, 0.25), (away_from_mean, 0.5), (away_from_mean, 5.0)):
            c = cumulants(model, maturity)
            func = lambda z: heston_mp(model, maturity, z)  # noqa: E731
            with self.subTest(model=model, maturity=maturity):
                self.assertAlmostEqual(c.c1 / log_cumulant(func, 1), 1.0, places=9)
                self.assertAlmostEqual(c.c2 / log_cumulant(func, 2), 1.0, places=8)
                self.assertEqual(c.c4, 0.0)

    def test_heston_variance_for_published_parameters(self):
        self.assertAlmostEqual(cumulants(HESTON, 2.0).c2, 0.3212179942, places=9)


class ParameterTestCase(SimpleTestCase):
    """Validation of model and market records."""

    def test_variance_gamma_rejects_non_positive_nu(self):
        with self.assertRaises(ParameterError) as ctx:
            VarianceGammaParams(theta=-0.1, nu=0.0, sigma=0.1)
        self.assertEqual(ctx.exception.field, 'nu')
        self.assertIn('nu', str(ctx.exception))

    def test_variance_gamma_martingale_argument(self):
        with self.assertRaises(ParameterError) as ctx:
            VarianceGammaParams(theta=5.0, nu=0.5, sigma=0.1)
        self.assertEqual(ctx.exception.field, 'theta')

    def test_heston_rejects_correlation_of_one(self):
        with self.assertRaises(ParameterError) as ctx:
            HestonParams(kappa=1.0, theta=0.1, sigma=1.0, v0=0.1, rho=1.0)
        self.assertEqual(ctx.exception.field, 'rho')

    def test_black_scholes_rejects_nan(self):
        with self.assertRaises(ParameterError):
            BlackScholesParams(sigma=math.nan)

    def test_build_model(self):
        self.assertEqual(build_model('vg', {'theta': -0.1436, 'nu': 0.3, 'sigma': 0.12136}), VG)
        with self.assertRaises(ParameterError) as ctx:
            build_model('merton', {})
        self.assertEqual(ctx.exception.field, 'model')
        with self.assertRaises(ParameterError) as ctx:
            build_model('bs', {})
        self.assertEqual(ctx.exception.field, 'params')

    def test_market_from_spot(self):
        market = MarketInputs.from_spot(100.0, 0.1, 0.02, 2.0)
        self.assertAlmostEqual(market.forward, 100.0 * math.exp(0.16), places=12)
        self.assertAlmostEqual(market.discount, math.exp(-0.2), places=15)
        self.assertEqual(market.maturity, 2.0)

    def test_market_validation(self):
        for kwargs, field in (
            ({'forward': 0.0, 'discount': 1.0, 'maturity': 1.0}, 'forward'),
            ({'forward': 100.0, 'discount': 1.5, 'maturity': 1.0}, 'discount'),
            ({'forward': 100.0, 'discount': 1.0, 'maturity': -1.0}, 'maturity'),
        ):
            with self.subTest(field=field):
                with self.assertRaises(MarketError) as ctx:
                    MarketInputs(**kwargs)
                self.assertEqual(ctx.exception.field, field)

from unittest import mock

import numpy as np
from django.core.cache import caches
from django.test import SimpleTestCase

from charfn.params import BlackScholesParams, HestonParams, MarketInputs, VarianceGammaParams
from common.exceptions import ParameterError
from cosclassic.batches import Backend, StrikeBatch
from cosclassic.pricer import black_scholes_put, price_puts_classic, price_puts_classic_alt
from cosrange.truncation import model_range

from . import cache
from .density import lognormal_logreturn_density, reconstruct_density
from .pricer import price_batch, price_puts_nufft
from .spectral import Mapping, assemble_alt, assemble_classic

BS = BlackScholesParams(sigma=0.2)
HESTON = HestonParams(kappa=1.0, theta=0.1, sigma=1.0, v0=0.1, rho=-0.9)
VG = VarianceGammaParams(theta=-0.1436, nu=0.3, sigma=0.12136)
STRIKES = np.linspace(60.0, 140.0, 100)


class SpectralAssemblyTestCase(SimpleTestCase):
    """Layout of the assembled spectra."""

    def setUp(self):
        self.market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        self.trange = model_range(VG, 1.0, 10.0, 16)

    def test_classic_spectrum_has_no_negative_modes(self):
        coeffs = assemble_classic(VG, self.market, self.trange)
        self.assertEqual(coeffs.N, 32)
        self.assertIs(coeffs.mapping, Mapping.CLASSIC)
        np.testing.assert_array_equal(coeffs.spectrum[:16], 0)
        self.assertNotEqual(coeffs.spectrum[16], 0)
        self.assertEqual(coeffs.residual_constant, 0)

    def test_alt_spectrum_mirrors_conjugate_factors(self):
        coeffs = assemble_alt(VG, self.market, self.trange)
        self.assertIs(coeffs.mapping, Mapping.ALT)
        self.assertEqual(coeffs.spectrum[0], 0)  # k = -M
        self.assertEqual(coeffs.spectrum[16], 0)  # k = 0
        self.assertNotEqual(coeffs.residual_constant, 0)

    def test_term_override(self):
        coeffs = assemble_classic(VG, self.market, self.trange, M=64)
        self.assertEqual(coeffs.M, 64)

    def test_mapped_points_lie_in_nufft_domain(self):
        batch = StrikeBatch.build(STRIKES, self.market, self.trange)
        for coeffs in (assemble_classic(VG, self.market, self.trange), assemble_alt(VG, self.market, self.trange)):
            points = coeffs.map_points(batch.log_moneyness)
            with self.subTest(mapping=coeffs.mapping):
                self.assertTrue(np.all((points >= -0.5) & (points < 0.5)))


class NufftPricerTestCase(SimpleTestCase):
    """NUFFT-backed prices against the per-strike sums."""

    def setUp(self):
        caches['spectral'].clear()

    def test_backend_identity_at_strict_tolerance(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=2.0)
        trange = model_range(HESTON, 2.0, 8.0, 256)
        batch = StrikeBatch.build(STRIKES, market, trange)
        classic = price_puts_classic(HESTON, market, trange, batch).puts
        fast = price_puts_nufft(
            assemble_classic(HESTON, market, trange), market, batch, tolerance=1e-16, direct_crossover=0,
        ).puts
        np.testing.assert_allclose(fast, classic, rtol=1e-12)

    def test_alt_backend_identity(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=2.0)
        trange = model_range(HESTON, 2.0, 8.0, 256)
        batch = StrikeBatch.build(STRIKES, market, trange)
        alt = price_puts_classic_alt(HESTON, market, trange, batch).puts
        fast = price_puts_nufft(
            assemble_alt(HESTON, market, trange), market, batch, tolerance=1e-16, direct_crossover=0,
        ).puts
        np.testing.assert_allclose(fast, alt, rtol=1e-10)

    def test_black_scholes_all_backends(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 256)
        expected = black_scholes_put(market, STRIKES, 0.2)
        for formula in ('classic', 'alt'):
            for backend in ('direct', 'nufft'):
                prices = price_batch(BS, market, trange, STRIKES, formula=formula, backend=backend, tolerance=1e-13)
                with self.subTest(formula=formula, backend=backend):
                    self.assertLess(np.max(np.abs(prices.puts - expected)), 1e-9)

    def test_price_batch_fills_parity_calls(self):
        market = MarketInputs.from_spot(100.0, 0.1, 0.0, 1.0)
        trange = model_range(VG, 1.0, 10.0, 128)
        prices = price_batch(VG, market, trange, STRIKES, formula='alt', backend='nufft')
        self.assertIs(prices.backend, Backend.NUFFT_ALT)
        np.testing.assert_allclose(
            prices.calls - prices.puts, market.discount * (market.forward - STRIKES),
            rtol=1e-12, atol=1e-12 * market.forward,
        )

    def test_invalid_strikes_priced_nan(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 64)
        prices = price_batch(BS, market, trange, [100.0, 1e6], backend='nufft')
        self.assertTrue(np.isfinite(prices.puts[0]))
        self.assertTrue(np.isnan(prices.puts[1]))
        self.assertTrue(np.isnan(prices.calls[1]))

    def test_unknown_backend(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 64)
        with self.assertRaises(ParameterError):
            price_batch(BS, market, trange, STRIKES, backend='gpu')


class SpectralCacheTestCase(SimpleTestCase):
    """Spectra are assembled once per maturity and reused."""

    def setUp(self):
        caches['spectral'].clear()
        self.market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        self.trange = model_range(VG, 1.0, 10.0, 128)

    def test_second_batch_hits_cache(self):
        assembler = mock.Mock(wraps=assemble_classic)
        with mock.patch.dict(cache._ASSEMBLERS, {'classic': assembler}):
            first = cache.spectral_coefficients(VG, self.market, self.trange, 'classic')
            second = cache.spectral_coefficients(VG, self.market, self.trange, 'classic')
        self.assertEqual(assembler.call_count, 1)
        np.testing.assert_array_equal(first.spectrum, second.spectrum)

    def test_key_depends_on_inputs(self):
        other = MarketInputs(forward=101.0, discount=1.0, maturity=1.0)
        self.assertNotEqual(
            cache.cache_key(VG, self.market, self.trange, 'classic'),
            cache.cache_key(VG, other, self.trange, 'classic'),
        )
        self.assertNotEqual(
            cache.cache_key(VG, self.market, self.trange, 'classic'),
            cache.cache_key(VG, self.market, self.trange, 'alt'),
        )


class DensityTestCase(SimpleTestCase):
    """COS density reconstruction."""

    def test_black_scholes_density_at_mean(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 256)
        c1 = trange.cumulants.c1
        expected = lognormal_logreturn_density(c1, 0.2, 1.0)
        for backend in ('direct', 'nufft'):
            batch = reconstruct_density(BS, market, trange, [c1], backend=backend, tolerance=1e-12, direct_crossover=0)
            with self.subTest(backend=backend):
                self.assertAlmostEqual(batch.density[0], expected, delta=1e-8)

    def test_black_scholes_density_curve(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 256)
        x = np.linspace(-0.8, 0.8, 301)
        batch = reconstruct_density(BS, market, trange, x, backend='nufft', tolerance=1e-12)
        np.testing.assert_allclose(batch.density, lognormal_logreturn_density(x, 0.2, 1.0), atol=1e-8)

    def test_heston_density_integrates_to_one(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=2.0)
        trange = model_range(HESTON, 2.0, 8.0, 1024)
        cells = 4096
        h = trange.width / cells
        midpoints = trange.a + (np.arange(cells) + 0.5) * h
        for backend in ('direct', 'nufft'):
            batch = reconstruct_density(HESTON, market, trange, midpoints, backend=backend, tolerance=1e-12)
            with self.subTest(backend=backend):
                self.assertAlmostEqual(np.sum(batch.density) * h, 1.0, delta=1e-6)

    def test_points_outside_range_flagged(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 64)
        with self.assertLogs('nufftpricer.density', level='WARNING'):
            batch = reconstruct_density(BS, market, trange, [0.0, trange.b + 1.0])
        np.testing.assert_array_equal(batch.valid, [True, False])
        self.assertTrue(np.isnan(batch.density[1]))

    def test_empty_points(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 64)
        for backend in ('direct', 'nufft'):
            batch = reconstruct_density(BS, market, trange, [], backend=backend)
            self.assertEqual(batch.density.shape, (0,))

    def test_unknown_backend(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        trange = model_range(BS, 1.0, 8.0, 64)
        with self.assertRaises(ParameterError):
            reconstruct_density(BS, market, trange, [0.0], backend='fft')

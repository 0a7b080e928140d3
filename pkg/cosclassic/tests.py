from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from charfn.params import BlackScholesParams, HestonParams, MarketInputs, VarianceGammaParams
from common.exceptions import ParameterError
from cosrange.truncation import model_range

from .batches import Backend, StrikeBatch
from .pricer import black_scholes_put, parity_calls, price_puts_classic, price_puts_classic_alt

BS = BlackScholesParams(sigma=0.2)
HESTON = HestonParams(kappa=1.0, theta=0.1, sigma=1.0, v0=0.1, rho=-0.9)
VG = VarianceGammaParams(theta=-0.1436, nu=0.3, sigma=0.12136)
STRIKES = np.linspace(60.0, 140.0, 100)


class StrikeBatchTestCase(SimpleTestCase):
    """Test cases for strike validation and flagging."""

    def setUp(self):
        self.market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)
        self.trange = model_range(BS, 1.0, 8.0, 64)

    def test_log_moneyness(self):
        batch = StrikeBatch.build([50.0, 100.0, 200.0], self.market, self.trange)
        np.testing.assert_allclose(batch.log_moneyness, np.log([0.5, 1.0, 2.0]))
        self.assertTrue(batch.valid.all())
        self.assertEqual(len(batch), 3)

    def test_strikes_outside_range_are_flagged(self):
        with self.assertLogs('cosclassic.batches', level='WARNING') as logs:
            batch = StrikeBatch.build([100.0, 1e6], self.market, self.trange)
        np.testing.assert_array_equal(batch.valid, [True, False])
        self.assertIn('1 of 2 strikes', logs.output[0])

    def test_non_positive_strike_rejected(self):
        with self.assertRaises(ParameterError) as ctx:
            StrikeBatch.build([100.0, 0.0], self.market, self.trange)
        self.assertEqual(ctx.exception.field, 'strikes')

    def test_backend_selection(self):
        self.assertIs(Backend.select('classic', 'direct'), Backend.CLASSIC)
        self.assertIs(Backend.select('alt', 'nufft'), Backend.NUFFT_ALT)
        with self.assertRaises(ParameterError):
            Backend.select('carr-madan', 'direct')


class ClassicPricerTestCase(SimpleTestCase):
    """Per-strike COS sums against closed forms and structural properties."""

    def setUp(self):
        self.market = MarketInputs(forward=100.0, discount=1.0, maturity=1.0)

    def _price(self, model, market, L, M, strikes=STRIKES, pricer=price_puts_classic, **kwargs):
        trange = model_range(model, market.maturity, L, M)
        batch = StrikeBatch.build(strikes, market, trange)
        return pricer(model, market, trange, batch, **kwargs), batch

    def test_black_scholes_both_formulas(self):
        expected = black_scholes_put(self.market, STRIKES, 0.2)
        for pricer in (price_puts_classic, price_puts_classic_alt):
            prices, _ = self._price(BS, self.market, 8.0, 256, pricer=pricer)
            with self.subTest(pricer=pricer.__name__):
                self.assertLess(np.max(np.abs(prices.puts - expected)), 1e-9)

    def test_discounting(self):
        market = MarketInputs.from_spot(100.0, 0.05, 0.0, 1.0)
        prices, _ = self._price(BS, market, 8.0, 256)
        np.testing.assert_allclose(prices.puts, black_scholes_put(market, STRIKES, 0.2), atol=1e-9)

    def test_put_call_parity(self):
        market = MarketInputs.from_spot(100.0, 0.1, 0.0, 1.0)
        puts, batch = self._price(VG, market, 10.0, 128)
        prices = parity_calls(puts, market, batch)
        lhs = prices.calls - prices.puts
        rhs = market.discount * (market.forward - STRIKES)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * market.forward)

    def test_puts_monotone_and_convex_in_strike(self):
        market = MarketInputs(forward=100.0, discount=1.0, maturity=2.0)
        prices, _ = self._price(HESTON, market, 8.0, 256)
        self.assertTrue(np.all(np.diff(prices.puts) > 0))
        self.assertTrue(np.all(np.diff(prices.puts, 2) > -1e-10))

    def test_classic_and_alt_agree_for_interior_strikes(self):
        # The two formulas treat mass outside [a, b] differently, so compare them
        # on a range wide enough for the Heston left tail.
        market = MarketInputs(forward=100.0, discount=1.0, maturity=2.0)
        interior = np.linspace(70.0, 130.0, 25)
        classic, _ = self._price(HESTON, market, 24.0, 2048, strikes=interior)
        alt, _ = self._price(HESTON, market, 24.0, 2048, strikes=interior, pricer=price_puts_classic_alt)
        self.assertLess(np.max(np.abs(classic.puts - alt.puts)), 1e-5)

    def test_backend_labels(self):
        classic, _ = self._price(BS, self.market, 8.0, 32)
        alt, _ = self._price(BS, self.market, 8.0, 32, pricer=price_puts_classic_alt)
        self.assertIs(classic.backend, Backend.CLASSIC)
        self.assertIs(alt.backend, Backend.CLASSIC_ALT)

    def test_invalid_strikes_priced_nan(self):
        prices, _ = self._price(BS, self.market, 8.0, 64, strikes=[100.0, 1e6])
        self.assertTrue(np.isfinite(prices.puts[0]))
        self.assertTrue(np.isnan(prices.puts[1]))

    def test_threads_do_not_change_results(self):
        with mock.patch('cosclassic.pricer._BLOCK_SIZE', 1024):
            single, _ = self._price(BS, self.market, 8.0, 256, threads=1)
            threaded, _ = self._price(BS, self.market, 8.0, 256, threads=4)
        np.testing.assert_array_equal(single.puts, threaded.puts)

    def test_empty_batch(self):
        prices, _ = self._price(BS, self.market, 8.0, 64, strikes=[])
        self.assertEqual(len(prices), 0)

    def test_results_are_read_only(self):
        prices, _ = self._price(BS, self.market, 8.0, 64)
        with self.assertRaises(ValueError):
            prices.puts[0] = 0.0

"""Reference COS pricer: per-strike evaluation of the classic and alternative formulas."""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import norm

from charfn.characteristic import charfn_eval_batch
from cosrange.coefficients import put_coefficients

from .batches import Backend, PriceBatch

logger = logging.getLogger(__name__)

# Upper bound on strikes x terms evaluated per block.
_BLOCK_SIZE = 1 << 20


def shifted_charfn(model, maturity, trange):
    """``phi(eta_k) exp(-i eta_k a)`` for ``k = 0 .. M-1``."""
    eta = trange.frequencies()
    return charfn_eval_batch(model, maturity, eta) * np.exp(-1j * eta * trange.a)


def _blocks(count, terms):
    step = max(1, _BLOCK_SIZE // max(terms, 1))
    return [slice(start, min(start + step, count)) for start in range(0, count, step)]


def _evaluate_blocks(func, count, terms, threads):
    out = np.empty(count, dtype=np.float64)
    blocks = _blocks(count, terms)
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for block, values in zip(blocks, pool.map(func, blocks)):
                out[block] = values
    else:
        for block in blocks:
            out[block] = func(block)
    return out


def price_puts_classic(model, market, trange, batch, threads=1, shifted=None):
    """Put prices from the strike-factored COS sum.

    ``P = B K [1/2 Re(phi(0)) U_0 + sum_{k>=1} Re(phi(eta_k) U_k exp(i eta_k (-x - a)))]``
    """
    if shifted is None:
        shifted = shifted_charfn(model, market.maturity, trange)
    u = put_coefficients(trange).values
    head = 0.5 * shifted[0].real * u[0]
    weights = shifted[1:] * u[1:]
    eta = trange.frequencies()[1:]
    x = batch.log_moneyness

    def block_sum(block):
        angle = np.multiply.outer(x[block], eta)
        return head + np.cos(angle) @ weights.real + np.sin(angle) @ weights.imag

    sums = _evaluate_blocks(block_sum, len(batch), trange.M, threads)
    puts = market.discount * batch.strikes * sums
    logger.debug(f"Classic COS priced {len(batch)} strikes with M={trange.M}")
    return PriceBatch.from_puts(batch, puts, Backend.CLASSIC)


def price_puts_classic_alt(model, market, trange, batch, threads=1, shifted=None):
    """Put prices from the alternative COS formula with strike-embedded ``V_k(x)``.

    ``P = B [1/2 Re(phi(0)) V_0(x) + sum_{k>=1} Re(phi(eta_k) exp(-i eta_k a)) V_k(x)]``
    """
    if shifted is None:
        shifted = shifted_charfn(model, market.maturity, trange)
    a, width, forward = trange.a, trange.width, market.forward
    eta = trange.frequencies()[1:]
    weights = shifted[1:].real
    c_damped = 2.0 * forward / (width * (1.0 + eta * eta))
    c_sine = 2.0 * forward / (width * eta)
    strike_free = np.exp(a) * np.dot(c_damped, weights)
    cos_weights = -c_damped * weights
    sin_weights = (c_sine - c_damped * eta) * weights
    x = batch.log_moneyness
    re_phi0 = shifted[0].real

    def block_sum(block):
        xb = x[block]
        exp_x = np.exp(xb)
        v0 = 2.0 * forward * (np.exp(a) - exp_x + exp_x * (xb - a)) / width
        angle = np.multiply.outer(xb - a, eta)
        oscillating = np.cos(angle) @ cos_weights + np.sin(angle) @ sin_weights
        return 0.5 * re_phi0 * v0 + strike_free + exp_x * oscillating

    sums = _evaluate_blocks(block_sum, len(batch), trange.M, threads)
    logger.debug(f"Alternative COS priced {len(batch)} strikes with M={trange.M}")
    return PriceBatch.from_puts(batch, market.discount * sums, Backend.CLASSIC_ALT)


def parity_calls(puts, market, batch):
    """Calls from put-call parity ``C = P + B (F - K)``."""
    calls = puts.puts + market.discount * (market.forward - batch.strikes)
    return puts.with_calls(calls)


def black_scholes_put(market, strikes, sigma):
    """Closed-form Black put on the forward."""
    strikes = np.asarray(strikes, dtype=np.float64)
    total_vol = sigma * np.sqrt(market.maturity)
    d1 = (np.log(market.forward / strikes) + 0.5 * total_vol ** 2) / total_vol
    d2 = d1 - total_vol
    return market.discount * (strikes * norm.cdf(-d2) - market.forward * norm.cdf(-d1))

import logging

import numpy as np

from cosclassic.batches import Backend, PriceBatch, StrikeBatch
from cosclassic.pricer import parity_calls, price_puts_classic, price_puts_classic_alt
from nufft.plan import (
    DEFAULT_DIRECT_CROSSOVER,
    DEFAULT_OVERSAMPLING,
    DEFAULT_TOLERANCE,
    execute_type2,
    plan,
)

from .cache import spectral_coefficients
from .spectral import Mapping

logger = logging.getLogger(__name__)


def price_puts_nufft(coeffs, market, batch, tolerance=DEFAULT_TOLERANCE, threads=1,
                     direct_crossover=DEFAULT_DIRECT_CROSSOVER, oversampling=DEFAULT_OVERSAMPLING):
    """Put prices for a strike batch from one type-2 NUFFT of ``coeffs``.

    Classic mapping: ``P_j = B K_j Re(fhat_j)``. Alternative mapping:
    ``P_j = B Re[K_j phi(0) (2 x_j - 1/(b-a)) + K_j fhat_j + residual]``.
    """
    valid = batch.valid
    strikes = batch.strikes[valid]
    points = coeffs.map_points(batch.log_moneyness[valid])
    nufft_plan = plan(points, coeffs.N, tolerance=tolerance, oversampling=oversampling,
                      workers=threads, direct_crossover=direct_crossover)
    fhat = execute_type2(nufft_plan, coeffs.spectrum)

    if coeffs.mapping is Mapping.CLASSIC:
        values = strikes * fhat.real
        backend = Backend.NUFFT
    else:
        affine = coeffs.phi0 * (2.0 * points - 1.0 / (coeffs.b - coeffs.a))
        values = (strikes * affine + strikes * fhat + coeffs.residual_constant).real
        backend = Backend.NUFFT_ALT

    puts = np.full(len(batch), np.nan)
    puts[valid] = market.discount * values
    return PriceBatch.from_puts(batch, puts, backend)


def price_batch(model, market, trange, strikes, formula='classic', backend='nufft',
                tolerance=DEFAULT_TOLERANCE, threads=1, direct_crossover=DEFAULT_DIRECT_CROSSOVER,
                oversampling=DEFAULT_OVERSAMPLING):
    """Price puts and parity calls for one maturity on the selected backend."""
    batch = strikes if isinstance(strikes, StrikeBatch) else StrikeBatch.build(strikes, market, trange)
    selected = Backend.select(formula, backend)
    logger.info(
        f"Pricing {len(batch)} strikes for {model.name} on {selected.value} "
        f"(M={trange.M}, L={trange.L})"
    )
    if selected is Backend.CLASSIC:
        puts = price_puts_classic(model, market, trange, batch, threads=threads)
    elif selected is Backend.CLASSIC_ALT:
        puts = price_puts_classic_alt(model, market, trange, batch, threads=threads)
    else:
        coeffs = spectral_coefficients(model, market, trange, formula)
        puts = price_puts_nufft(coeffs, market, batch, tolerance=tolerance, threads=threads,
                                direct_crossover=direct_crossover, oversampling=oversampling)
    return parity_calls(puts, market, batch)

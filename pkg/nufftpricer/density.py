"""COS reconstruction of the log-return density.

``f(x) ~ sum'_k Re(phi(eta_k) exp(-i eta_k a)) * 2/(b-a) * cos(eta_k (x - a))``
where the primed sum halves ``k = 0``. The NUFFT backend evaluates the same
cosine sum at many points through one type-2 transform on the alternative
mapping ``(x - a) / (2(b-a))``.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from common.exceptions import ParameterError
from cosclassic.pricer import shifted_charfn
from cosrange.coefficients import density_coefficients
from nufft.plan import (
    DEFAULT_DIRECT_CROSSOVER,
    DEFAULT_OVERSAMPLING,
    DEFAULT_TOLERANCE,
    execute_type2,
    plan,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DensityBatch:
    points: np.ndarray
    density: np.ndarray
    valid: np.ndarray
    backend: str


def cosine_weights(model, maturity, trange):
    """Primed-sum weights ``Re(phi~_k) * 2/(b-a)`` with ``k = 0`` halved."""
    weights = shifted_charfn(model, maturity, trange).real * density_coefficients(trange)
    weights[0] *= 0.5
    return weights


def reconstruct_density(model, market, trange, points, backend='direct',
                        tolerance=DEFAULT_TOLERANCE, threads=1,
                        direct_crossover=DEFAULT_DIRECT_CROSSOVER, oversampling=DEFAULT_OVERSAMPLING):
    """Density of ``ln(F(T,T)/F(0,T))`` at ``points``; points outside ``(a, b)`` are NaN."""
    points = np.array(points, dtype=np.float64).reshape(-1)
    valid = trange.contains(points)
    flagged = int(np.count_nonzero(~valid))
    if flagged:
        logger.warning(
            f"{flagged} of {points.size} density points fall outside ({trange.a:.6g}, {trange.b:.6g})"
        )

    weights = cosine_weights(model, market.maturity, trange)
    inside = points[valid] - trange.a
    if backend == 'direct':
        values = np.cos(np.multiply.outer(inside, trange.frequencies())) @ weights
    elif backend == 'nufft':
        M = trange.M
        spectrum = np.zeros(2 * M, dtype=np.complex128)
        spectrum[M:] = weights
        nufft_plan = plan(
            inside / (2.0 * trange.width), 2 * M, tolerance=tolerance, oversampling=oversampling,
            workers=threads, direct_crossover=direct_crossover,
        )
        values = execute_type2(nufft_plan, spectrum).real
    else:
        raise ParameterError('backend', f"expected 'direct' or 'nufft', got {backend!r}")

    density = np.full(points.size, np.nan)
    density[valid] = values
    return DensityBatch(points=points, density=density, valid=valid, backend=backend)


def lognormal_logreturn_density(x, sigma, maturity):
    """Closed-form Black-Scholes log-return density, mean ``-sigma^2 T / 2``."""
    total_vol = sigma * np.sqrt(maturity)
    return norm.pdf(x, loc=-0.5 * total_vol ** 2, scale=total_vol)

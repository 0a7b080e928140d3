"""Normalized characteristic functions and analytic cumulants.

``phi(z) = E[exp(i z ln(F(T,T)/F(0,T)))]`` for the Black-Scholes,
variance gamma and Heston models. All evaluation is vectorised over ``z``
in double precision; the scalar entry point runs the same code on a
one-element array.
"""
import logging
import math
import numbers

import numpy as np

from common.exceptions import ParameterError

from .params import (
    BlackScholesParams,
    Cumulants,
    HestonParams,
    VarianceGammaParams,
)

logger = logging.getLogger(__name__)


def _check_maturity(maturity):
    if not (isinstance(maturity, numbers.Real) and math.isfinite(maturity) and maturity > 0):
        raise ParameterError('maturity', f"must be a finite positive number, got {maturity!r}")


def _black_scholes(model, maturity, z):
    variance = model.sigma ** 2 * maturity
    return np.exp(-0.5 * variance * (1j * z + z * z))


def _variance_gamma(model, maturity, z):
    theta, nu, sigma = model.theta, model.nu, model.sigma
    rate = maturity / nu
    # 1 - i z nu (theta + i z sigma^2 / 2); real part >= 1 so the principal log is safe.
    base = 1.0 - 1j * z * nu * theta + 0.5 * sigma ** 2 * nu * z * z
    drift = rate * math.log(model.martingale_argument)
    return np.exp(-rate * np.log(base) + 1j * z * drift)


def _heston(model, maturity, z):
    kappa, theta, sigma, v0, rho = model.kappa, model.theta, model.sigma, model.v0, model.rho
    sigma2 = sigma * sigma
    beta = kappa - 1j * rho * sigma * z
    d = np.sqrt(beta * beta + (z * z + 1j * z) * sigma2)
    g = (beta - d) / (beta + d)
    exp_dt = np.exp(-d * maturity)
    one_minus_g_exp = 1.0 - g * exp_dt
    variance_term = (v0 / sigma2) * (1.0 - exp_dt) / one_minus_g_exp * (beta - d)
    mean_term = (kappa * theta / sigma2) * (
        (beta - d) * maturity - 2.0 * np.log(one_minus_g_exp / (1.0 - g))
    )
    return np.exp(variance_term + mean_term)


_EVALUATORS = {
    BlackScholesParams: _black_scholes,
    VarianceGammaParams: _variance_gamma,
    HestonParams: _heston,
}


def _evaluator(model):
    try:
        return _EVALUATORS[type(model)]
    except KeyError:
        raise ParameterError('model', f"unsupported model type {type(model).__name__}") from None


def charfn_eval_batch(model, maturity, z):
    """Evaluate phi elementwise over the real frequencies ``z``.

    Returns a complex128 array with the same shape as ``z``.
    """
    _check_maturity(maturity)
    evaluate = _evaluator(model)
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ParameterError('z', "frequencies must be finite")
    return np.asarray(evaluate(model, maturity, z), dtype=np.complex128)


def charfn_eval(model, maturity, z):
    """Evaluate phi at a single real frequency."""
    return complex(charfn_eval_batch(model, maturity, np.array([z], dtype=np.float64))[0])


def cumulants(model, maturity):
    """Analytic cumulants of ln(F(T,T)/F(0,T)).

    Black-Scholes and Heston return ``c4 = 0``; only ``c1`` and ``c2`` feed
    their truncation range.
    """
    _check_maturity(maturity)
    result = _analytic_cumulants(model, maturity)
    logger.debug(f"Cumulants for {model.name} at T={maturity}: {result}")
    return result


def _analytic_cumulants(model, maturity):
    T = maturity
    if isinstance(model, BlackScholesParams):
        variance = model.sigma ** 2 * T
        return Cumulants(c1=-0.5 * variance, c2=variance, c4=0.0)

    if isinstance(model, VarianceGammaParams):
        theta, nu, sigma = model.theta, model.nu, model.sigma
        omega = math.log(model.martingale_argument) / nu
        c1 = (theta + omega) * T
        c2 = (sigma ** 2 + nu * theta ** 2) * T
        c4 = 3.0 * (
            sigma ** 4 * nu + 2.0 * theta ** 4 * nu ** 3 + 4.0 * sigma ** 2 * theta ** 2 * nu ** 2
        ) * T
        return Cumulants(c1=c1, c2=c2, c4=c4)

    if isinstance(model, HestonParams):
        return _heston_cumulants(model, T)

    raise ParameterError('model', f"unsupported model type {type(model).__name__}")


def _heston_cumulants(model, T):
    """Mean and variance of ``X = -I/2 + int sqrt(v) dW``, ``I = int_0^T v dt``.

    With ``m(s) = E[v_s]`` and ``g(s) = (1 - exp(-kappa (T - s))) / kappa``,
    ``Var X = E[I] - rho sigma int m g ds + (sigma^2 / 4) int m g^2 ds``.
    """
    kappa, theta, eta, v0, rho = model.kappa, model.theta, model.sigma, model.v0, model.rho
    e1 = math.exp(-kappa * T)
    e2 = e1 * e1
    decay = -math.expm1(-kappa * T) / kappa
    excess = v0 - theta

    mean_variance = theta * T + excess * decay
    cross = theta * (T - decay) + excess * (decay - T * e1)
    square = (
        theta * (T - 2.0 * decay + (1.0 - e2) / (2.0 * kappa))
        + excess * (decay - 2.0 * T * e1 + (e1 - e2) / kappa)
    )
    c2 = mean_variance - rho * eta * cross / kappa + 0.25 * eta * eta * square / (kappa * kappa)
    return Cumulants(c1=-0.5 * mean_variance, c2=c2, c4=0.0)

"""COS payoff coefficients on a truncation range.

All sequences are indexed by ``k = 0 .. M-1``. The ``k = 0`` entries use
their dedicated closed forms; ``eta_0`` never enters a division.
"""
import enum
from dataclasses import dataclass

import numpy as np


class PayoffKind(enum.Enum):
    PUT_CLASSIC = 'put_classic'


def _frozen(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class PayoffCoefficients:
    values: np.ndarray
    kind: PayoffKind = PayoffKind.PUT_CLASSIC

    def __len__(self):
        return len(self.values)


def put_coefficients(trange):
    """Strike-factored put coefficients ``U_k``.

    ``U_0 = 2/(b-a) (e^a - 1 - a)`` and, for ``k >= 1``,
    ``U_k = 2/(b-a) [(e^a + eta sin(eta a) - cos(eta a)) / (1 + eta^2) - sin(eta a) / eta]``.
    """
    a, width = trange.a, trange.width
    scale = 2.0 / width
    values = np.empty(trange.M, dtype=np.float64)
    values[0] = scale * (np.exp(a) - 1.0 - a)
    eta = trange.eta(np.arange(1, trange.M))
    sin_a = np.sin(eta * a)
    cos_a = np.cos(eta * a)
    values[1:] = scale * (
        (np.exp(a) + eta * sin_a - cos_a) / (1.0 + eta * eta) - sin_a / eta
    )
    return PayoffCoefficients(values=_frozen(values))


def vk_split_terms(trange):
    """Strike-independent pieces of the alternative put coefficients ``V_k(x)``.

    Returns ``(factors, residuals)``:

    * ``factors[k] = (-1 - i eta_k) / ((b-a)(1+eta_k^2)) + i / ((b-a) eta_k)``
      for ``k >= 1``; ``factors[0] = 0``.
    * ``residuals[k] = 2 e^a / ((b-a)(1+eta_k^2))`` for ``k >= 1`` and the
      already-halved ``residuals[0] = e^a / (b-a)``; multiplied by the
      forward they give the strike-independent part of the price sum.
    """
    a, width = trange.a, trange.width
    factors = np.zeros(trange.M, dtype=np.complex128)
    residuals = np.empty(trange.M, dtype=np.float64)
    eta = trange.eta(np.arange(1, trange.M))
    damping = 1.0 / (width * (1.0 + eta * eta))
    factors[1:] = (-1.0 - 1j * eta) * damping + 1j / (width * eta)
    residuals[0] = np.exp(a) / width
    residuals[1:] = 2.0 * np.exp(a) * damping
    return _frozen(factors), _frozen(residuals)


def density_coefficients(trange):
    """Cosine-series density coefficients, ``2/(b-a)`` for every ``k``.

    The reconstruction halves the ``k = 0`` term.
    """
    return _frozen(np.full(trange.M, 2.0 / trange.width, dtype=np.float64))

"""Spectral coefficients that turn the COS sums into one type-2 NUFFT.

With ``N = 2M`` the spectrum is indexed over ``I_N = {-M, ..., M-1}`` and
stored with ``k = -M`` first, the layout the NUFFT engine expects.
"""
import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from cosclassic.pricer import shifted_charfn
from cosrange.coefficients import put_coefficients, vk_split_terms

logger = logging.getLogger(__name__)


class Mapping(enum.Enum):
    CLASSIC = 'classic'  # x_j = x / (2(b-a))
    ALT = 'alt'  # x_j = (x - a) / (2(b-a))


@dataclass(frozen=True, eq=False)
class SpectralCoefficients:
    spectrum: np.ndarray
    residual_constant: complex
    mapping: Mapping
    phi0: complex
    a: float
    b: float

    @property
    def N(self):
        return self.spectrum.shape[0]

    @property
    def M(self):
        return self.N // 2

    def map_points(self, log_moneyness):
        """NUFFT sample points for log-moneyness values inside ``(a, b)``."""
        x = np.asarray(log_moneyness, dtype=np.float64)
        scale = 2.0 * (self.b - self.a)
        if self.mapping is Mapping.CLASSIC:
            return x / scale
        return (x - self.a) / scale


def _with_terms(trange, M):
    return trange if M is None or M == trange.M else replace(trange, M=int(M))


def _readonly(array):
    array.flags.writeable = False
    return array


def assemble_classic(model, market, trange, M=None):
    """Spectrum of the classic COS put sum.

    ``f_k = phi(eta_k) exp(-i eta_k a) U_k`` for ``k = 1 .. M-1``,
    ``f_0 = phi(0) U_0 / 2`` and ``f_k = 0`` for negative ``k``.
    """
    trange = _with_terms(trange, M)
    M = trange.M
    shifted = shifted_charfn(model, market.maturity, trange)
    u = put_coefficients(trange).values
    spectrum = np.zeros(2 * M, dtype=np.complex128)
    spectrum[M] = 0.5 * shifted[0] * u[0]
    spectrum[M + 1:] = shifted[1:] * u[1:]
    logger.debug(f"Assembled classic spectrum with N={2 * M}")
    return SpectralCoefficients(
        spectrum=_readonly(spectrum),
        residual_constant=0j,
        mapping=Mapping.CLASSIC,
        phi0=complex(shifted[0]),
        a=trange.a,
        b=trange.b,
    )


def assemble_alt(model, market, trange, M=None):
    """Spectrum and strike-independent constant of the alternative COS formula.

    Positive modes carry ``phi~_k c_k`` and the mirrored negative modes
    ``phi~_k conj(c_k)``, with ``phi~_k = phi(eta_k) exp(-i eta_k a)`` and
    ``c_k`` the split factor of ``V_k``. Both ``f_0`` and ``f_{-M}`` are zero.
    """
    trange = _with_terms(trange, M)
    M = trange.M
    shifted = shifted_charfn(model, market.maturity, trange)
    factors, residuals = vk_split_terms(trange)
    spectrum = np.zeros(2 * M, dtype=np.complex128)
    spectrum[M + 1:] = shifted[1:] * factors[1:]
    # Modes -1 .. -(M-1) sit at storage indices M-1 .. 1.
    spectrum[M - 1:0:-1] = shifted[1:] * np.conj(factors[1:])
    residual_constant = market.forward * complex(np.dot(shifted, residuals))
    logger.debug(f"Assembled alternative spectrum with N={2 * M}")
    return SpectralCoefficients(
        spectrum=_readonly(spectrum),
        residual_constant=residual_constant,
        mapping=Mapping.ALT,
        phi0=complex(shifted[0]),
        a=trange.a,
        b=trange.b,
    )

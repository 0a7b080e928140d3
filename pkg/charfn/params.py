"""Model and market parameter records.

Each model record validates its own domain on construction so that an
invalid parameter set never reaches the characteristic function as a
silent NaN.
"""
import math
import numbers
from dataclasses import dataclass, asdict
from typing import ClassVar, Union

from common.exceptions import MarketError, ParameterError


def _require_finite(name, value):
    if not isinstance(value, numbers.Real) or not math.isfinite(value):
        raise ParameterError(name, f"must be a finite number, got {value!r}")


@dataclass(frozen=True)
class BlackScholesParams:
    """Lognormal forward with constant volatility ``sigma`` (per sqrt-year)."""

    sigma: float

    name: ClassVar[str] = 'bs'

    def __post_init__(self):
        _require_finite('sigma', self.sigma)
        if self.sigma <= 0:
            raise ParameterError('sigma', f"must be > 0, got {self.sigma}")

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class VarianceGammaParams:
    """Variance gamma with drift ``theta``, variance rate ``nu`` and volatility ``sigma``."""

    theta: float
    nu: float
    sigma: float

    name: ClassVar[str] = 'vg'

    def __post_init__(self):
        for field in ('theta', 'nu', 'sigma'):
            _require_finite(field, getattr(self, field))
        if self.nu <= 0:
            raise ParameterError('nu', f"must be > 0, got {self.nu}")
        if self.sigma <= 0:
            raise ParameterError('sigma', f"must be > 0, got {self.sigma}")
        if self.martingale_argument <= 0:
            raise ParameterError(
                'theta',
                "1 - theta*nu - sigma^2*nu/2 must be > 0 "
                f"(got {self.martingale_argument})",
            )

    @property
    def martingale_argument(self):
        return 1.0 - self.theta * self.nu - 0.5 * self.sigma ** 2 * self.nu

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class HestonParams:
    """Heston stochastic volatility.

    ``kappa`` mean reversion, ``theta`` long-run variance, ``sigma`` vol of
    vol, ``v0`` initial variance, ``rho`` spot/variance correlation.
    """

    kappa: float
    theta: float
    sigma: float
    v0: float
    rho: float

    name: ClassVar[str] = 'heston'

    def __post_init__(self):
        for field in ('kappa', 'theta', 'sigma', 'v0', 'rho'):
            _require_finite(field, getattr(self, field))
        if self.kappa <= 0:
            raise ParameterError('kappa', f"must be > 0, got {self.kappa}")
        if self.theta <= 0:
            raise ParameterError('theta', f"must be > 0, got {self.theta}")
        if self.sigma <= 0:
            raise ParameterError('sigma', f"must be > 0, got {self.sigma}")
        if self.v0 < 0:
            raise ParameterError('v0', f"must be >= 0, got {self.v0}")
        if not -1.0 < self.rho < 1.0:
            raise ParameterError('rho', f"must lie in (-1, 1), got {self.rho}")

    def as_dict(self):
        return asdict(self)


ModelParams = Union[BlackScholesParams, VarianceGammaParams, HestonParams]

MODEL_TYPES = {
    BlackScholesParams.name: BlackScholesParams,
    VarianceGammaParams.name: VarianceGammaParams,
    HestonParams.name: HestonParams,
}


def build_model(name, params):
    """Build a model record from its registry name and a parameter mapping."""
    try:
        model_type = MODEL_TYPES[name]
    except KeyError:
        raise ParameterError(
            'model', f"unknown model {name!r}, expected one of {sorted(MODEL_TYPES)}"
        ) from None
    try:
        return model_type(**params)
    except TypeError as exc:
        raise ParameterError('params', str(exc)) from exc


@dataclass(frozen=True)
class MarketInputs:
    """Forward ``F(0,T)``, discount factor ``B(T)`` and maturity ``T`` in years."""

    forward: float
    discount: float
    maturity: float

    def __post_init__(self):
        for field in ('forward', 'discount', 'maturity'):
            value = getattr(self, field)
            if not isinstance(value, numbers.Real) or not math.isfinite(value):
                raise MarketError(field, f"must be a finite number, got {value!r}")
        if self.forward <= 0:
            raise MarketError('forward', f"must be > 0, got {self.forward}")
        if not 0.0 < self.discount <= 1.0:
            raise MarketError('discount', f"must lie in (0, 1], got {self.discount}")
        if self.maturity <= 0:
            raise MarketError('maturity', f"must be > 0, got {self.maturity}")

    @classmethod
    def from_spot(cls, spot, rate, dividend, maturity):
        """Forward and discount from spot, rate and dividend yield: F = S e^{(r-q)T}, B = e^{-rT}."""
        if not spot > 0:
            raise MarketError('spot', f"must be > 0, got {spot}")
        forward = spot * math.exp((rate - dividend) * maturity)
        discount = math.exp(-rate * maturity)
        return cls(forward=forward, discount=discount, maturity=maturity)


@dataclass(frozen=True)
class Cumulants:
    """Log-return cumulants of order 1, 2 and 4."""

    c1: float
    c2: float
    c4: float = 0.0

"""Benchmark case registry: the variance gamma test cases, the Heston rows and a Black-Scholes sanity case."""
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from charfn.params import BlackScholesParams, HestonParams, MarketInputs, VarianceGammaParams
from common.exceptions import ParameterError

STRIKE_COUNTS = (10, 25, 100, 500, 2500)
STRIKE_BOUNDS = (60.0, 140.0)
ALL_BACKENDS = (
    ('classic', 'direct'),
    ('alt', 'direct'),
    ('classic', 'nufft'),
    ('alt', 'nufft'),
)


@dataclass(frozen=True)
class ReferenceSpec:
    """Where reference prices come from: a high-M COS run or the Black-Scholes closed form.

    ``formula`` picks the COS formula of a self reference; ``match`` prices each
    backend against its own formula on the same range.
    """

    kind: str = 'self'  # 'self' | 'closed_form'
    formula: str = 'classic'  # 'classic' | 'alt' | 'match'
    M: int = None
    L: float = None
    M_setting: str = 'BENCH_REFERENCE_M'

    def resolved(self):
        """Term count and range level, falling back to the project settings."""
        M = self.M or getattr(settings, self.M_setting, 1 << 20)
        L = self.L or getattr(settings, 'BENCH_REFERENCE_L', 20.0)
        return int(M), float(L)


@dataclass(frozen=True)
class Thresholds:
    """Asserted upper bounds; a case passes when every bound set here holds."""

    max_abs_error: float = None
    rmse: float = None
    mean_abs_error: float = None


@dataclass(frozen=True)
class PublishedClaim:
    """Published error figures, reported next to the asserted bounds but never asserted."""

    max_abs_error: float = None
    rmse_band: tuple = None
    mean_abs_band: tuple = None


@dataclass(frozen=True)
class BenchCase:
    name: str
    description: str
    model: object
    spot: float
    rate: float
    dividend: float
    maturity: float
    L: float
    M: int
    tolerance: float = 1e-9
    strike_counts: tuple = STRIKE_COUNTS
    strike_bounds: tuple = STRIKE_BOUNDS
    spacing: str = 'linear'
    backends: tuple = ALL_BACKENDS
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    thresholds: Thresholds = field(default_factory=Thresholds)
    published: PublishedClaim = field(default_factory=PublishedClaim)

    def market(self):
        return MarketInputs.from_spot(self.spot, self.rate, self.dividend, self.maturity)

    def strikes(self, count, spacing=None):
        return strike_grid(*self.strike_bounds, count, spacing or self.spacing)


def strike_grid(low, high, count, spacing='linear'):
    """Equidistant (``linear``) or log-uniform (``log``) strikes on ``[low, high]``."""
    if count < 0:
        raise ParameterError('count', f"must be >= 0, got {count}")
    if spacing == 'linear':
        return np.linspace(low, high, count)
    if spacing == 'log':
        return np.geomspace(low, high, count) if count else np.empty(0)
    raise ParameterError('spacing', f"expected 'linear' or 'log', got {spacing!r}")


VG_SHORT = VarianceGammaParams(theta=-0.1436, nu=0.3, sigma=0.12136)
VG_STEEP = VarianceGammaParams(theta=1.5, nu=0.2, sigma=1.0)
HESTON = HestonParams(kappa=1.0, theta=0.1, sigma=1.0, v0=0.1, rho=-0.9)

CASES = {
    case.name: case
    for case in (
        BenchCase(
            name='bs',
            description='Black-Scholes sanity case against the closed form',
            model=BlackScholesParams(sigma=0.2),
            spot=100.0, rate=0.0, dividend=0.0, maturity=1.0, L=8.0, M=256,
            tolerance=1e-13,
            reference=ReferenceSpec(kind='closed_form'),
            thresholds=Thresholds(max_abs_error=1e-9),
        ),
        BenchCase(
            name='vg1',
            description='Variance gamma case 1, T=1, smooth density',
            model=VG_SHORT,
            spot=100.0, rate=0.1, dividend=0.0, maturity=1.0, L=10.0, M=128,
            thresholds=Thresholds(max_abs_error=1e-4),
            published=PublishedClaim(max_abs_error=1e-4),
        ),
        BenchCase(
            name='vg2',
            description='Variance gamma case 2, T=0.1, algebraic blow-up at the origin',
            model=VG_SHORT,
            spot=100.0, rate=0.1, dividend=0.0, maturity=0.1, L=10.0, M=1024,
            thresholds=Thresholds(max_abs_error=2e-3),
            published=PublishedClaim(max_abs_error=1e-4),
        ),
        BenchCase(
            name='vg4',
            description='Variance gamma case 4, T=1, smooth density',
            model=VG_STEEP,
            spot=100.0, rate=0.02, dividend=0.0, maturity=1.0, L=10.0, M=1024,
            tolerance=1e-16,
            thresholds=Thresholds(max_abs_error=1e-12),
            published=PublishedClaim(max_abs_error=1e-12),
        ),
        BenchCase(
            name='vg5',
            description='Variance gamma case 5, T=0.1, logarithmic blow-up at the origin',
            model=VG_STEEP,
            spot=100.0, rate=0.02, dividend=0.0, maturity=0.1, L=10.0, M=1024,
            tolerance=1e-13,
            thresholds=Thresholds(max_abs_error=2e-3),
            published=PublishedClaim(max_abs_error=3e-5),
        ),
        BenchCase(
            name='heston256',
            description='Heston, M=256, L=8',
            model=HESTON,
            spot=100.0, rate=0.0, dividend=0.0, maturity=2.0, L=8.0, M=256,
            reference=ReferenceSpec(formula='match', L=8.0, M_setting='BENCH_HESTON_REFERENCE_M'),
            thresholds=Thresholds(rmse=1.7e-5, mean_abs_error=3.9e-5),
            published=PublishedClaim(rmse_band=(1.9e-6, 1.7e-5), mean_abs_band=(4.4e-6, 3.9e-5)),
        ),
        BenchCase(
            name='heston1024',
            description='Heston, M=1024, L=8',
            model=HESTON,
            spot=100.0, rate=0.0, dividend=0.0, maturity=2.0, L=8.0, M=1024,
            reference=ReferenceSpec(formula='match', L=8.0, M_setting='BENCH_HESTON_REFERENCE_M'),
        ),
    )
}

SUITES = {
    'published': ('vg1', 'vg2', 'vg4', 'vg5', 'heston256', 'heston1024'),
    'quick': ('bs', 'vg1'),
    'all': tuple(CASES),
}


def resolve_cases(names=None, suite=None):
    """Cases selected by name or suite; unknown names raise ``ParameterError`` listing the registry."""
    if suite is not None:
        if suite not in SUITES:
            raise ParameterError('suite', f"unknown suite {suite!r}; available: {', '.join(sorted(SUITES))}")
        names = SUITES[suite]
    names = list(names or SUITES['quick'])
    unknown = [name for name in names if name not in CASES]
    if unknown:
        raise ParameterError(
            'cases', f"unknown case(s) {', '.join(unknown)}; available: {', '.join(CASES)}"
        )
    return [CASES[name] for name in names]

import logging
import math
from dataclasses import dataclass

import numpy as np

from charfn.characteristic import cumulants as model_cumulants
from charfn.params import Cumulants
from common.exceptions import DegenerateRangeError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TruncationRange:
    """Log-return interval ``[a, b]`` with term count ``M`` and level ``L``."""

    a: float
    b: float
    M: int
    L: float
    cumulants: Cumulants

    @property
    def width(self):
        return self.b - self.a

    def eta(self, k):
        """Frequencies ``k pi / (b - a)``."""
        return np.asarray(k, dtype=np.float64) * (math.pi / self.width)

    def frequencies(self):
        """``eta_k`` for ``k = 0 .. M-1``."""
        return self.eta(np.arange(self.M))

    def contains(self, x):
        """Boolean mask of log-moneyness values strictly inside ``(a, b)``."""
        x = np.asarray(x, dtype=np.float64)
        return (x > self.a) & (x < self.b)


def truncation_range(c, L, M):
    """Cumulant rule ``a, b = c1 -/+ L sqrt(|c2| + sqrt(|c4|))``."""
    if not (math.isfinite(L) and L > 0):
        raise ParameterError('L', f"must be > 0, got {L}")
    if int(M) != M or M < 2:
        raise ParameterError('M', f"must be an integer >= 2, got {M}")
    half_width = L * math.sqrt(abs(c.c2) + math.sqrt(abs(c.c4)))
    if half_width == 0.0:
        raise DegenerateRangeError(
            f"cumulants c2={c.c2}, c4={c.c4} give an empty truncation range"
        )
    a = c.c1 - half_width
    b = c.c1 + half_width
    if not a < b:
        raise DegenerateRangeError(f"truncation range collapsed: a={a}, b={b}")
    logger.debug(f"Truncation range [{a}, {b}] with L={L}, M={M}")
    return TruncationRange(a=a, b=b, M=int(M), L=float(L), cumulants=c)


def model_range(model, maturity, L, M):
    """Truncation range from a model's analytic cumulants."""
    return truncation_range(model_cumulants(model, maturity), L, M)

import enum
import logging
from dataclasses import dataclass, replace

import numpy as np

from common.exceptions import ParameterError

logger = logging.getLogger(__name__)


class Backend(enum.Enum):
    CLASSIC = 'classic'
    CLASSIC_ALT = 'classic_alt'
    NUFFT = 'nufft'
    NUFFT_ALT = 'nufft_alt'

    @classmethod
    def select(cls, formula, backend):
        """Backend for a ``formula`` (classic|alt) and evaluation ``backend`` (direct|nufft)."""
        table = {
            ('classic', 'direct'): cls.CLASSIC,
            ('alt', 'direct'): cls.CLASSIC_ALT,
            ('classic', 'nufft'): cls.NUFFT,
            ('alt', 'nufft'): cls.NUFFT_ALT,
        }
        try:
            return table[(formula, backend)]
        except KeyError:
            raise ParameterError(
                'backend', f"unknown combination formula={formula!r}, backend={backend!r}"
            ) from None


def _readonly(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class StrikeBatch:
    """Strikes of one maturity with their log-moneyness and validity flags."""

    strikes: np.ndarray
    log_moneyness: np.ndarray
    valid: np.ndarray

    @classmethod
    def build(cls, strikes, market, trange):
        strikes = np.array(strikes, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(strikes)) or np.any(strikes <= 0):
            raise ParameterError('strikes', "every strike must be finite and > 0")
        log_moneyness = np.log(strikes / market.forward)
        valid = trange.contains(log_moneyness)
        flagged = int(np.count_nonzero(~valid))
        if flagged:
            logger.warning(
                f"{flagged} of {strikes.size} strikes fall outside the truncation range "
                f"({trange.a:.6g}, {trange.b:.6g}) and are flagged invalid"
            )
        return cls(
            strikes=_readonly(strikes),
            log_moneyness=_readonly(log_moneyness),
            valid=_readonly(valid),
        )

    def __len__(self):
        return self.strikes.shape[0]


@dataclass(frozen=True, eq=False)
class PriceBatch:
    """Put and call prices for a strike batch; invalid strikes hold NaN."""

    strikes: np.ndarray
    puts: np.ndarray
    calls: np.ndarray
    valid: np.ndarray
    backend: Backend

    @classmethod
    def from_puts(cls, batch, puts, backend):
        puts = np.where(batch.valid, puts, np.nan)
        calls = np.full_like(puts, np.nan)
        return cls(
            strikes=batch.strikes,
            puts=_readonly(puts),
            calls=_readonly(calls),
            valid=batch.valid,
            backend=backend,
        )

    def with_calls(self, calls):
        return replace(self, calls=_readonly(np.where(self.valid, calls, np.nan)))

    def __len__(self):
        return self.strikes.shape[0]

import hashlib
import logging

from django.conf import settings
from django.core.cache import caches

from .spectral import assemble_alt, assemble_classic

logger = logging.getLogger(__name__)

_ASSEMBLERS = {
    'classic': assemble_classic,
    'alt': assemble_alt,
}


def _cache():
    return caches[getattr(settings, 'SPECTRAL_CACHE_ALIAS', 'default')]


def cache_key(model, market, trange, formula):
    digest = hashlib.sha1(repr((model, market, trange, formula)).encode()).hexdigest()
    return f"spectral:{formula}:{digest}"


def spectral_coefficients(model, market, trange, formula):
    """Assembled spectrum for one maturity, reused across strike batches."""
    key = cache_key(model, market, trange, formula)
    coeffs = _cache().get(key)
    if coeffs is None:
        coeffs = _ASSEMBLERS[formula](model, market, trange)
        _cache().set(key, coeffs, timeout=None)
        logger.debug(f"Cached {formula} spectrum under {key}")
    return coeffs

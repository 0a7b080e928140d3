"""Exponential-of-semicircle spreading kernel.

``phi(z) = exp(beta (sqrt(1 - z^2) - 1))`` on ``|z| <= 1``, zero outside.
The kernel spans ``w`` fine-grid cells; its width is the smallest integer
whose standard error estimate ``exp(-pi w sqrt(1 - 1/sigma))`` falls below
the requested tolerance, plus one cell of margin.
"""
import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

MIN_WIDTH = 4
MAX_WIDTH = 16

# Frequencies handled per quadrature block when tabulating the kernel transform.
_QUADRATURE_BLOCK = 1 << 15


def kernel_width(tolerance, oversampling):
    """Kernel width ``w`` in fine-grid cells for a target tolerance."""
    decay = math.pi * math.sqrt(1.0 - 1.0 / oversampling)
    width = math.ceil(math.log(1.0 / tolerance) / decay) + 1
    if width > MAX_WIDTH:
        logger.warning(
            f"Tolerance {tolerance:g} needs kernel width {width}; clamped to {MAX_WIDTH}"
        )
    return min(max(width, MIN_WIDTH), MAX_WIDTH)


def kernel_beta(width, oversampling):
    """Shape parameter ``beta`` for a kernel of ``width`` cells."""
    return 0.97 * math.pi * width * (1.0 - 0.5 / oversampling)


def evaluate(z, beta):
    """Kernel values at normalised offsets ``z``."""
    z = np.asarray(z, dtype=np.float64)
    inside = np.abs(z) <= 1.0
    root = np.sqrt(np.where(inside, 1.0 - z * z, 0.0))
    return np.where(inside, np.exp(beta * (root - 1.0)), 0.0)


def fourier_transform(k, width, beta, grid_size):
    """Continuous Fourier transform of the kernel at mode ``k``.

    The kernel lives on unit grid spacing, ``psi(u) = phi(2u / w)``, so its
    transform at angular frequency ``2 pi k / n`` is
    ``(w/2) * integral_{-1}^{1} phi(z) cos(pi k w z / n) dz``, computed with
    Gauss-Legendre quadrature. Even in ``k``.
    """
    k = np.abs(np.asarray(k, dtype=np.float64))
    nodes, weights = np.polynomial.legendre.leggauss(4 * width + 20)
    weighted = weights * evaluate(nodes, beta)
    scale = math.pi * width / grid_size
    out = np.empty(k.shape, dtype=np.float64)
    flat_k = k.reshape(-1)
    flat_out = out.reshape(-1)
    for start in range(0, flat_k.size, _QUADRATURE_BLOCK):
        block = flat_k[start:start + _QUADRATURE_BLOCK]
        flat_out[start:start + _QUADRATURE_BLOCK] = np.cos(
            np.outer(block * scale, nodes)
        ) @ weighted
    return 0.5 * width * out

"""Type-2 non-uniform FFT.

Evaluates ``fhat_j = sum_{k in I_N} f_k exp(-2 pi i k x_j)`` for
``I_N = {-N/2, ..., N/2 - 1}`` and ``x_j in [-1/2, 1/2)``.

Spectra are stored in ``I_N`` order: index 0 holds ``k = -N/2``. The
transform deconvolves the spectrum by the kernel's Fourier transform,
places it on an oversampled grid of power-of-two size ``n``, runs one
complex FFT and interpolates at the sample points with a sparse matrix of
kernel weights built once per plan.
"""
import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft
import scipy.sparse

from common.exceptions import ParameterError, PointRangeError, SizeMismatchError

from . import kernel

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
DEFAULT_OVERSAMPLING = 2.0
DEFAULT_DIRECT_CROSSOVER = 1 << 14

_DIRECT_BLOCK = 1 << 20


def index_set(N):
    """Frequencies of ``I_N`` in storage order."""
    return np.arange(-(N // 2), N // 2)


def to_fft_layout(coefficients, grid_size):
    """Scatter an ``I_N``-ordered spectrum onto an FFT grid of ``grid_size``.

    Mode ``k`` lands at index ``k mod grid_size``; the rest of the grid is zero.
    """
    coefficients = np.asarray(coefficients)
    N = coefficients.shape[0]
    grid = np.zeros(grid_size, dtype=np.complex128)
    grid[index_set(N) % grid_size] = coefficients
    return grid


def _check_points(points):
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1)
    bad = np.flatnonzero(~((points >= -0.5) & (points < 0.5)))
    if bad.size:
        index = int(bad[0])
        raise PointRangeError(index, float(points[index]))
    return points


def _check_spectrum(spectrum, N):
    spectrum = np.asarray(spectrum, dtype=np.complex128).reshape(-1)
    if spectrum.shape[0] != N:
        raise SizeMismatchError(f"spectrum has {spectrum.shape[0]} modes, plan expects N={N}")
    return spectrum


@dataclass(frozen=True, eq=False)
class NufftPlan:
    """Precomputed type-2 transform for fixed points, size and tolerance."""

    N: int
    points: np.ndarray
    tolerance: float
    oversampling: float
    kernel_width: int
    beta: float
    grid_size: int
    direct: bool
    workers: int = 1
    deconvolution: np.ndarray = field(default=None, repr=False)
    interpolation: scipy.sparse.csr_matrix = field(default=None, repr=False)

    @property
    def J(self):
        return self.points.shape[0]

    @property
    def kernel_halfwidth(self):
        return math.ceil(self.kernel_width / 2)


def _grid_size(N, oversampling, width):
    target = max(math.ceil(oversampling * N), 2 * width)
    return 1 << max(1, math.ceil(math.log2(target)))


def _interpolation_matrix(points, width, beta, grid_size):
    # Grid coordinates are exact: the grid size is a power of two.
    s = points * grid_size
    start = np.ceil(s - 0.5 * width).astype(np.int64)
    cells = start[:, None] + np.arange(width)[None, :]
    weights = kernel.evaluate((s[:, None] - cells) / (0.5 * width), beta)
    rows = np.repeat(np.arange(points.shape[0]), width)
    return scipy.sparse.csr_matrix(
        (weights.reshape(-1), (rows, (cells % grid_size).reshape(-1))),
        shape=(points.shape[0], grid_size),
    )


@functools.lru_cache(maxsize=64)
def _deconvolution(N, width, beta, grid_size):
    """Read-only ``1 / h_k`` over ``I_N``, shared by plans with the same parameters."""
    deconvolution = 1.0 / kernel.fourier_transform(index_set(N), width, beta, grid_size)
    deconvolution.flags.writeable = False
    return deconvolution


def plan(points, N, tolerance=DEFAULT_TOLERANCE, oversampling=DEFAULT_OVERSAMPLING,
         direct_crossover=DEFAULT_DIRECT_CROSSOVER, workers=1):
    """Build a reusable plan for ``points`` and transform size ``N``.

    Batches with ``J * N`` below ``direct_crossover`` are evaluated by the
    direct sum; the output contract is unchanged.
    """
    if int(N) != N or N < 2 or N % 2:
        raise ParameterError('N', f"transform size must be a positive even integer, got {N}")
    if not 1e-16 <= tolerance <= 1e-4:
        raise ParameterError('tolerance', f"must lie in [1e-16, 1e-4], got {tolerance}")
    if oversampling < 2.0:
        raise ParameterError('oversampling', f"must be >= 2, got {oversampling}")
    N = int(N)
    points = _check_points(points).copy()
    points.flags.writeable = False

    width = kernel.kernel_width(tolerance, oversampling)
    beta = kernel.kernel_beta(width, oversampling)
    grid_size = _grid_size(N, oversampling, width)
    direct = points.shape[0] * N < direct_crossover
    if direct:
        deconvolution = interpolation = None
    else:
        deconvolution = _deconvolution(N, width, beta, grid_size)
        interpolation = _interpolation_matrix(points, width, beta, grid_size)

    logger.debug(
        f"NUFFT plan: N={N}, J={points.shape[0]}, tolerance={tolerance:g}, "
        f"width={width}, beta={beta:.4f}, grid={grid_size}, direct={direct}"
    )
    return NufftPlan(
        N=N,
        points=points,
        tolerance=float(tolerance),
        oversampling=float(oversampling),
        kernel_width=width,
        beta=beta,
        grid_size=grid_size,
        direct=direct,
        workers=max(1, int(workers)),
        deconvolution=deconvolution,
        interpolation=interpolation,
    )


def execute_type2(nufft_plan, spectrum):
    """Values of the ``I_N``-ordered ``spectrum`` at the plan's points."""
    spectrum = _check_spectrum(spectrum, nufft_plan.N)
    if nufft_plan.direct:
        return nudft_direct(nufft_plan.points, spectrum)
    grid = to_fft_layout(spectrum * nufft_plan.deconvolution, nufft_plan.grid_size)
    values = scipy.fft.fft(grid, workers=nufft_plan.workers)
    return nufft_plan.interpolation @ values


def _split(x):
    # Veltkamp split: both halves carry at most 27 significant bits, so their
    # products with integer modes below 2**26 are exact in double precision.
    c = 134217729.0 * x
    high = c - (c - x)
    return high, x - high


def _fractional_phase(k, x_high, x_low):
    p_high = np.multiply.outer(x_high, k)
    p_low = np.multiply.outer(x_low, k)
    return (p_high - np.round(p_high)) + (p_low - np.round(p_low))


def nudft_direct(points, spectrum):
    """Exact ``O(N J)`` evaluation of the type-2 sum.

    Phases ``k x_j`` are reduced modulo one without rounding error before
    the complex exponential is taken.
    """
    points = _check_points(points)
    spectrum = np.asarray(spectrum, dtype=np.complex128).reshape(-1)
    N = spectrum.shape[0]
    if N % 2:
        raise SizeMismatchError(f"spectrum length must be even, got {N}")
    k = index_set(N).astype(np.float64)
    x_high, x_low = _split(points)
    out = np.empty(points.shape[0], dtype=np.complex128)
    step = max(1, _DIRECT_BLOCK // max(N, 1))
    for start in range(0, points.shape[0], step):
        stop = start + step
        phase = _fractional_phase(k, x_high[start:stop], x_low[start:stop])
        out[start:stop] = np.exp(-2j * np.pi * phase) @ spectrum
    return out


def relative_error(approx, exact, spectrum):
    """Maximum absolute deviation normalised by the spectrum's l2 norm."""
    deviation = np.max(np.abs(np.asarray(approx) - np.asarray(exact)), initial=0.0)
    norm = np.linalg.norm(np.asarray(spectrum))
    if norm == 0.0:
        return float(deviation)
    return float(deviation / norm)

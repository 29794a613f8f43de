"""Gaussian similarity kernel and graph degrees.

The kernel is kappa(x, y) = exp(-||x - y||^2 / sigma) with sigma a squared
distance scale.  Everything is computed in row blocks so the degree path
never holds more than O(n * block_rows) floats, and the full-matrix path
touches each unordered block pair once.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    CapacityError,
    DegeneracyError,
    DimensionError,
    IndexingError,
    NumericError,
    ParameterError,
)

DEFAULT_BLOCK_ROWS = 1024


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric positive semidefinite similarity matrix plus its width.

    Invariants (guaranteed by construction, checked in the test suite):
    exact symmetry, unit diagonal, entries in [0, 1].
    """

    values: np.ndarray
    sigma: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise DimensionError(f"kernel matrix must be square, got {values.shape}")
        if not self.sigma > 0.0:
            raise ParameterError(f"kernel width sigma must be > 0, got {self.sigma}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def n(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class DegreeVector:
    """Row sums of a kernel matrix; strictly positive."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DimensionError(f"degrees must be a vector, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise NumericError("degrees contain non-finite entries")
        if values.size == 0 or values.min() <= 0.0:
            raise DegeneracyError("degrees must all be positive")
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]


def _sq_dists(Xa, Xb):
    # Direct sum of (x_i - y_i)^2.  The expanded |x|^2 + |y|^2 - 2<x,y> form
    # would be faster but loses precision for near-duplicate points and is
    # not exactly symmetric in floating point; the direct form is both.
    diff = Xa[:, None, :] - Xb[None, :, :]
    return np.einsum("abk,abk->ab", diff, diff)


def gaussian_kernel_block(Xa, Xb, sigma):
    """Kernel evaluations between two point sets, exp(-||x-y||^2 / sigma)."""
    return np.exp(_sq_dists(Xa, Xb) / -sigma)


def _check_sigma(sigma):
    if not sigma > 0.0:
        raise ParameterError(f"kernel width sigma must be > 0, got {sigma}")


def gaussian_kernel_matrix(X, sigma, block_rows=DEFAULT_BLOCK_ROWS):
    """Build the full n-by-n Gaussian kernel matrix.

    Each unordered block pair is evaluated once and mirrored, so the result
    is exactly symmetric and the diagonal is exactly 1.

    Parameters
    ----------
    X : DataMatrix
    sigma : float
        Kernel width (squared-distance units), > 0.
    block_rows : int
        Row block size; bounds the temporary distance buffers.

    Returns
    -------
    KernelMatrix

    Raises
    ------
    CapacityError
        If the n*n float64 buffer cannot be allocated.
    """
    _check_sigma(sigma)
    n = X.n
    try:
        K = np.empty((n, n))
    except MemoryError as exc:
        raise CapacityError(
            f"kernel matrix for n={n} needs {8 * n * n} bytes"
        ) from exc
    values = X.values
    for i0 in range(0, n, block_rows):
        i1 = min(i0 + block_rows, n)
        for j0 in range(i0, n, block_rows):
            j1 = min(j0 + block_rows, n)
            block = gaussian_kernel_block(values[i0:i1], values[j0:j1], sigma)
            K[i0:i1, j0:j1] = block
            if j0 > i0:
                K[j0:j1, i0:i1] = block.T
    return KernelMatrix(K, sigma)


def gaussian_kernel_columns(X, sigma, J, block_rows=DEFAULT_BLOCK_ROWS):
    """Columns J of the Gaussian kernel matrix without building the matrix.

    J must contain unique indices in [0, n).  Column order follows J.
    """
    _check_sigma(sigma)
    n = X.n
    J = np.atleast_1d(np.asarray(J))
    if J.ndim != 1 or J.size == 0:
        raise IndexingError("J must be a non-empty index vector")
    if not np.issubdtype(J.dtype, np.integer):
        raise IndexingError(f"J must hold integers, got dtype {J.dtype}")
    if J.min() < 0 or J.max() >= n:
        raise IndexingError(f"column index out of range [0, {n})")
    if np.unique(J).size != J.size:
        raise IndexingError("J contains repeated indices")
    anchors = X.values[J]
    cols = np.empty((n, J.size))
    for i0 in range(0, n, block_rows):
        i1 = min(i0 + block_rows, n)
        cols[i0:i1] = gaussian_kernel_block(X.values[i0:i1], anchors, sigma)
    return cols


def degree_vector(X, sigma, block_rows=DEFAULT_BLOCK_ROWS):
    """Exact kernel row sums, streamed so peak memory is O(n * block_rows).

    Row sums of a materialized kernel matrix reduce over the same contiguous
    axis in the same order, so both routes agree bitwise.
    """
    _check_sigma(sigma)
    n = X.n
    deg = np.empty(n)
    for i0 in range(0, n, block_rows):
        i1 = min(i0 + block_rows, n)
        deg[i0:i1] = gaussian_kernel_block(X.values[i0:i1], X.values, sigma).sum(axis=1)
    return DegreeVector(deg)

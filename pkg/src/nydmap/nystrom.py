"""Nystrom low-rank approximation of the symmetric diffusion operator.

Two ways to build the factors of A ~= C W^-1 C^T:

* uniform column sampling: C = A(:, J), W = A(J, J), built from streamed
  kernel columns so A is never materialized;
* Gaussian random projection: an orthonormal sketch basis Q is computed
  from S = A^(2q+1) Omega by subspace iteration, then C = AQ, W = Q^T C.

Eigenpairs are recovered through F = C W^-1/2 and its thin SVD: the squared
singular values of F approximate the eigenvalues of A and the left singular
vectors approximate its eigenvectors.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ContractError,
    DegeneracyError,
    DimensionError,
    ParameterError,
    RankDeficiencyWarning,
)
from .kernel import DegreeVector
from .spectral import SpectralModel, fix_signs, recover_markov_eigvecs

STRATEGIES = ("uniform_columns", "gaussian_projection")

_METHOD_TAG = {
    "uniform_columns": "nystrom_columns",
    "gaussian_projection": "nystrom_projection",
}


@dataclass(frozen=True)
class SketchConfig:
    """Parameters of a randomized factorization.

    The sketch uses l = target_rank_d + oversampling columns; l must not
    exceed n (checked where n is known).  pinv_tolerance is the relative
    eigenvalue cutoff used when (pseudo-)inverting W.
    """

    target_rank_d: int
    oversampling: int = 10
    power_iterations_q: int = 2
    strategy: str = "gaussian_projection"
    seed: int = 0
    pinv_tolerance: float = 1e-12

    def __post_init__(self):
        if self.target_rank_d < 1:
            raise ParameterError(f"target rank must be >= 1, got {self.target_rank_d}")
        if self.oversampling < 0:
            raise ParameterError(f"oversampling must be >= 0, got {self.oversampling}")
        if self.power_iterations_q < 0:
            raise ParameterError(
                f"power iteration count must be >= 0, got {self.power_iterations_q}"
            )
        if self.strategy not in STRATEGIES:
            raise ParameterError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        if not 0.0 < self.pinv_tolerance < 1.0:
            raise ParameterError(
                f"pinv_tolerance must lie in (0, 1), got {self.pinv_tolerance}"
            )

    @property
    def sketch_size(self):
        return self.target_rank_d + self.oversampling


@dataclass(frozen=True)
class NystromFactors:
    """Factors C (n-by-l) and W (l-by-l symmetric) of A ~= C W^-1 C^T."""

    C: np.ndarray
    W: np.ndarray
    strategy: str

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        W = np.asarray(self.W, dtype=float)
        if C.ndim != 2:
            raise DimensionError(f"C must be a matrix, got shape {C.shape}")
        l = C.shape[1]
        if W.shape != (l, l):
            raise DimensionError(f"W must be {l}x{l} to match C, got {W.shape}")
        if W.size and float(np.abs(W - W.T).max()) > 1e-10:
            raise ContractError("W is not symmetric within 1e-10")
        if self.strategy not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.strategy!r}")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "W", W)

    @property
    def sketch_size(self):
        return self.C.shape[1]


def _apply(A_apply, B):
    """Multiply the operator by a block: ndarray, .matmat object or callable."""
    if isinstance(A_apply, np.ndarray):
        return A_apply @ B
    if hasattr(A_apply, "matmat"):
        return A_apply.matmat(B)
    if callable(A_apply):
        return np.asarray(A_apply(B), dtype=float)
    raise ParameterError(
        "A_apply must be an ndarray, expose .matmat, or be callable"
    )


def sample_columns(kernel_columns, deg, l, seed):
    """Uniform-without-replacement column-sampling factors.

    Draws l distinct indices J, fetches the corresponding kernel columns
    through the ``kernel_columns(J)`` callback and rescales them by
    1/sqrt(deg[i] deg[j]), which yields the columns of A without ever
    forming A.  W is the row restriction C[J, :].

    Returns
    -------
    (NystromFactors, J) with J sorted ascending.
    """
    n = deg.n
    if not 1 <= l <= n:
        raise ParameterError(f"need 1 <= l <= n={n}, got l={l}")
    J = np.sort(np.random.default_rng(seed).choice(n, size=l, replace=False))
    cols = np.asarray(kernel_columns(J), dtype=float)
    if cols.shape != (n, l):
        raise DimensionError(
            f"kernel_columns returned shape {cols.shape}, expected ({n}, {l})"
        )
    root = np.sqrt(deg.values)
    C = cols / (root[:, None] * root[J][None, :])
    W = C[J, :].copy()
    return NystromFactors(C, W, "uniform_columns"), J


def _orthonormal_columns(Y, rng):
    """Orthonormal basis for range(Y) via pivoted QR, padded on rank collapse.

    If the numerical rank of Y falls short of its column count the missing
    directions are refilled with random vectors orthogonalized against the
    computed basis, and a RankDeficiencyWarning is emitted.
    """
    n, l = Y.shape
    Q, R, _ = scipy.linalg.qr(Y, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(diag > diag[0] * n * np.finfo(float).eps))
    if rank == l:
        return Q
    warnings.warn(
        f"sketch rank collapsed to {rank} of {l}; padding with fresh random directions",
        RankDeficiencyWarning,
        stacklevel=3,
    )
    base = Q[:, :rank]
    pad = rng.standard_normal((n, l - rank))
    # Two orthogonalization rounds; one is not always enough near collapse.
    for _ in range(2):
        pad -= base @ (base.T @ pad)
        pad, _ = np.linalg.qr(pad)
    return np.concatenate([base, pad], axis=1)


def gaussian_sketch_basis(A_apply, n, l, q, seed):
    """Orthonormal basis capturing the dominant range of a symmetric operator.

    Forms S = A Omega with Omega an n-by-l standard normal matrix drawn from
    ``seed``, then runs q subspace-iteration passes.  A is symmetric, so one
    pass multiplies by A twice, re-orthonormalizing after every multiply to
    prevent the basis from collapsing onto the top eigenvector; the result
    spans the range of (A A^T)^q A Omega.

    Returns
    -------
    Q : ndarray of shape (n, l) with Q^T Q = I to machine precision.
    """
    if not 1 <= l <= n:
        raise ParameterError(f"need 1 <= l <= n={n}, got l={l}")
    if q < 0:
        raise ParameterError(f"power iteration count must be >= 0, got {q}")
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((n, l))
    Q = _orthonormal_columns(_apply(A_apply, omega), rng)
    for _ in range(q):
        Q = _orthonormal_columns(_apply(A_apply, Q), rng)
        Q = _orthonormal_columns(_apply(A_apply, Q), rng)
    return Q


def project(A_apply, Q):
    """Projection factors C = AQ and W = Q^T C for an orthonormal basis Q.

    W is symmetrized as (W + W^T)/2 before use; for symmetric A the
    asymmetry is pure rounding noise.
    """
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2:
        raise DimensionError(f"Q must be a matrix, got shape {Q.shape}")
    gram = Q.T @ Q
    drift = float(np.abs(gram - np.eye(Q.shape[1])).max())
    if drift > 1e-8:
        raise ContractError(
            f"Q is not orthonormal: max |Q^T Q - I| = {drift:.3e} > 1e-8"
        )
    C = _apply(A_apply, Q)
    if C.shape != Q.shape:
        raise DimensionError(
            f"operator returned shape {C.shape}, expected {Q.shape}"
        )
    W = Q.T @ C
    W = 0.5 * (W + W.T)
    return NystromFactors(C, W, "gaussian_projection")


def psd_inverse_sqrt(W, tol):
    """Spectral pseudo-inverse square root of a symmetric PSD matrix.

    Eigenvalues at or below tol * lambda_max are treated as zero, the rest
    are mapped to 1/sqrt(lambda).  Raises DegeneracyError when the largest
    eigenvalue is not positive, meaning the sketch captured nothing.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionError(f"W must be square, got shape {W.shape}")
    if not 0.0 < tol < 1.0:
        raise ParameterError(f"tol must lie in (0, 1), got {tol}")
    if W.size and float(np.abs(W - W.T).max()) > 1e-10:
        raise ContractError("W is not symmetric within 1e-10")
    vals, vecs = scipy.linalg.eigh(W)
    lam_max = vals[-1]
    if not lam_max > 0.0:
        raise DegeneracyError(
            f"W has no positive spectrum (largest eigenvalue {lam_max:.3e}); "
            "the sketch captured nothing"
        )
    inv_root = np.zeros_like(vals)
    keep = vals > tol * lam_max
    inv_root[keep] = 1.0 / np.sqrt(vals[keep])
    M = (vecs * inv_root) @ vecs.T
    return 0.5 * (M + M.T)


def nystrom_eigs(factors, d, deg, tol=1e-12):
    """Approximate top-d eigenpairs of A from Nystrom factors.

    Forms F = C W^-1/2 and takes its thin SVD; eigenvalues are the squared
    singular values (guaranteeing the diffusion spectrum stays nonnegative)
    and eigenvectors of A are the left singular vectors.  If the numerical
    rank of F (same relative cutoff as the pseudo-inverse) is below d, the
    result is truncated and a RankDeficiencyWarning records the effective
    rank.

    Returns
    -------
    SpectralModel with method set per the factors' strategy.
    """
    l = factors.sketch_size
    if not 1 <= d <= l:
        raise ParameterError(f"need 1 <= d <= sketch size {l}, got d={d}")
    if factors.C.shape[0] != deg.n:
        raise DimensionError(
            f"factors are for n={factors.C.shape[0]} but degrees have length {deg.n}"
        )
    F = factors.C @ psd_inverse_sqrt(factors.W, tol)
    U, svals, _ = np.linalg.svd(F, full_matrices=False)
    if not svals[0] > 0.0:
        raise DegeneracyError("approximate factor F is identically zero")
    effective_rank = int(np.count_nonzero(svals > svals[0] * np.sqrt(tol)))
    keep = min(d, effective_rank)
    if keep < d:
        warnings.warn(
            f"requested {d} eigenpairs but the factor has effective rank "
            f"{effective_rank}; returning {keep}",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    vals = svals[:keep] ** 2
    vecs = fix_signs(U[:, :keep])
    markov = recover_markov_eigvecs(vecs, deg)
    return SpectralModel(
        vals, vecs, markov, deg, _METHOD_TAG[factors.strategy], keep
    )


def sketch_model(A_apply, n, config, deg, kernel_columns=None):
    """Run a full sketch-to-model pipeline described by a SketchConfig.

    For the projection strategy ``A_apply`` provides operator multiplies;
    for column sampling ``kernel_columns`` provides kernel columns (see
    sample_columns).  Convenience wrapper used by the benchmark runner.
    """
    l = config.sketch_size
    if config.strategy == "uniform_columns":
        if kernel_columns is None:
            raise ParameterError("column sampling needs a kernel_columns callback")
        factors, _ = sample_columns(kernel_columns, deg, l, config.seed)
    else:
        Q = gaussian_sketch_basis(A_apply, n, l, config.power_iterations_q, config.seed)
        factors = project(A_apply, Q)
    return nystrom_eigs(factors, config.target_rank_d, deg, config.pinv_tolerance)

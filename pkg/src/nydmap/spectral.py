"""Diffusion-operator construction and deterministic eigendecomposition.

From a kernel matrix K with degrees D the module builds the row-stochastic
Markov matrix P = D^-1 K and the symmetric operator A = D^-1/2 K D^-1/2.
A and P are similar, so the spectrum is computed on A with a symmetric
solver and Markov eigenvectors are recovered by scaling with D^-1/2.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import ContractError, DimensionError, ParameterError
from .kernel import DEFAULT_BLOCK_ROWS, DegreeVector, gaussian_kernel_block

METHODS = ("deterministic", "nystrom_columns", "nystrom_projection")

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralModel:
    """Top-d eigenpairs of the symmetric diffusion operator.

    eigenvalues are sorted descending; eigenvectors_sym columns are
    orthonormal eigenvectors of A; eigenvectors_markov columns are the
    corresponding unit-norm eigenvectors of P.  Every eigenvector column is
    sign-fixed: its largest-magnitude entry is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors_sym: np.ndarray
    eigenvectors_markov: np.ndarray
    degrees: DegreeVector
    method: str
    rank_d: int

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        if vals.ndim != 1:
            raise DimensionError("eigenvalues must be a vector")
        d = vals.size
        for name in ("eigenvectors_sym", "eigenvectors_markov"):
            mat = np.asarray(getattr(self, name), dtype=float)
            if mat.ndim != 2 or mat.shape != (self.degrees.n, d):
                raise DimensionError(
                    f"{name} must have shape ({self.degrees.n}, {d}), got {mat.shape}"
                )
            object.__setattr__(self, name, mat)
        if self.method not in METHODS:
            raise ParameterError(f"unknown method tag {self.method!r}")
        if self.rank_d != d:
            raise DimensionError(
                f"rank_d={self.rank_d} disagrees with {d} stored eigenpairs"
            )
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def n(self):
        return self.degrees.n


def fix_signs(U):
    """Flip column signs so each column's largest-magnitude entry is positive.

    Eigenvectors are defined only up to sign; this pins a deterministic
    representative (ties broken by the first maximal entry).
    """
    U = np.array(U, dtype=float)
    if U.ndim != 2:
        raise DimensionError("expected a matrix of column vectors")
    if U.shape[1] == 0:
        return U
    rows = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[rows, np.arange(U.shape[1])])
    signs[signs == 0.0] = 1.0
    return U * signs


def markov_matrix(K, deg):
    """Row-stochastic transition matrix P with P[i, j] = K[i, j] / deg[i]."""
    if deg.n != K.n:
        raise DimensionError(f"degree length {deg.n} does not match n={K.n}")
    return K.values / deg.values[:, None]


def symmetric_matrix(K, deg, overwrite=False, block_rows=DEFAULT_BLOCK_ROWS):
    """Symmetric operator A with A[i, j] = K[i, j] / sqrt(deg[i] * deg[j]).

    The denominator is formed as the product sqrt(deg[i]) * sqrt(deg[j]),
    which is commutative, so A is exactly as symmetric as K.  With
    ``overwrite=True`` the kernel buffer is normalized in place and the
    KernelMatrix must not be used afterwards; this halves peak memory for
    large n.
    """
    if deg.n != K.n:
        raise DimensionError(f"degree length {deg.n} does not match n={K.n}")
    root = np.sqrt(deg.values)
    out = K.values if overwrite else np.empty_like(K.values)
    for i0 in range(0, K.n, block_rows):
        i1 = min(i0 + block_rows, K.n)
        np.divide(K.values[i0:i1], root[i0:i1, None] * root[None, :], out=out[i0:i1])
    return out


def max_asymmetry(A, block_rows=DEFAULT_BLOCK_ROWS):
    """max |A - A^T|, computed in row blocks to avoid an n*n temporary."""
    worst = 0.0
    for i0 in range(0, A.shape[0], block_rows):
        i1 = min(i0 + block_rows, A.shape[0])
        worst = max(worst, float(np.abs(A[i0:i1, :] - A[:, i0:i1].T).max()))
    return worst


def eigendecompose(A, d, check_symmetry=True):
    """Top-d eigenpairs of a symmetric matrix, descending, sign-fixed.

    Uses an implicitly restarted Lanczos iteration with a fixed start
    vector when d is well below n, and a dense solver otherwise.  The start
    vector is the constant unit vector rather than the solver's random
    default so that repeated runs are bitwise identical.  If the iteration
    stalls (tightly clustered spectrum) the dense solver takes over and a
    UserWarning records the switch.

    Parameters
    ----------
    A : ndarray, symmetric n-by-n
    d : int, 1 <= d <= n
    check_symmetry : bool
        Verify max |A - A^T| <= 1e-10 before decomposing.

    Returns
    -------
    (eigenvalues, eigenvectors) : (d,) descending and (n, d) orthonormal.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if not 1 <= d <= n:
        raise ParameterError(f"need 1 <= d <= n={n}, got d={d}")
    if check_symmetry:
        asym = max_asymmetry(A)
        if asym > SYMMETRY_TOL:
            raise ContractError(
                f"matrix is asymmetric: max |A - A^T| = {asym:.3e} > {SYMMETRY_TOL}"
            )
    # ARPACK needs k < n and room for its Krylov basis; below that it beats
    # the dense solver comfortably.
    if d <= n - 2 and n > max(256, 3 * d):
        v0 = np.full(n, 1.0 / np.sqrt(n))
        try:
            vals, vecs = eigsh(A, k=d, which="LA", v0=v0)
        except ArpackNoConvergence:
            # Tightly clustered spectra (kernel near identity) can stall the
            # Lanczos iteration; the dense solver handles them, at an n*n
            # memory cost that only this pathological path pays.
            warnings.warn(
                "iterative eigensolver stalled on a clustered spectrum; "
                "falling back to a dense solve",
                UserWarning,
                stacklevel=2,
            )
            vals, vecs = scipy.linalg.eigh(A, subset_by_index=[n - d, n - 1])
    else:
        vals, vecs = scipy.linalg.eigh(A, subset_by_index=[n - d, n - 1])
    order = np.argsort(-vals, kind="stable")
    return vals[order], fix_signs(vecs[:, order])


def recover_markov_eigvecs(U_sym, deg):
    """Markov-operator eigenvectors from eigenvectors of A.

    P = D^-1/2 A D^1/2, so if A u = lam u then v = D^-1/2 u satisfies
    P v = lam v.  Columns are rescaled to unit norm and sign-fixed.
    """
    U_sym = np.asarray(U_sym, dtype=float)
    if U_sym.ndim != 2:
        raise DimensionError("U_sym must be a matrix of column vectors")
    if U_sym.shape[0] != deg.n:
        raise DimensionError(
            f"U_sym has {U_sym.shape[0]} rows but degrees have length {deg.n}"
        )
    V = U_sym / np.sqrt(deg.values)[:, None]
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0.0] = 1.0
    return fix_signs(V / norms)


def deterministic_model(K, deg, d, overwrite_kernel=False):
    """Full deterministic pipeline from kernel to SpectralModel.

    Builds A, decomposes it, and recovers Markov eigenvectors.  With
    ``overwrite_kernel=True`` the kernel buffer is consumed by the
    normalization (see symmetric_matrix).
    """
    A = symmetric_matrix(K, deg, overwrite=overwrite_kernel)
    vals, vecs = eigendecompose(A, d, check_symmetry=False)
    markov = recover_markov_eigvecs(vecs, deg)
    return SpectralModel(vals, vecs, markov, deg, "deterministic", d)


class DiffusionOperator:
    """Matrix-free block multiply by A = D^-1/2 K D^-1/2.

    Rebuilds kernel row blocks on demand, so a multiply costs a full kernel
    pass but peak memory stays O(n * block_rows).  This is the multiply
    provider for the projection sketch when the kernel matrix does not fit
    or should not be materialized.
    """

    def __init__(self, data, sigma, deg, block_rows=DEFAULT_BLOCK_ROWS):
        if not sigma > 0.0:
            raise ParameterError(f"kernel width sigma must be > 0, got {sigma}")
        if deg.n != data.n:
            raise DimensionError(
                f"degree length {deg.n} does not match n={data.n}"
            )
        self._points = data.values
        self._sigma = float(sigma)
        self._inv_root_deg = 1.0 / np.sqrt(deg.values)
        self._block_rows = int(block_rows)
        self.shape = (data.n, data.n)

    def matmat(self, B):
        B = np.asarray(B, dtype=float)
        single = B.ndim == 1
        if single:
            B = B[:, None]
        n = self.shape[0]
        if B.shape[0] != n:
            raise DimensionError(f"operand has {B.shape[0]} rows, expected {n}")
        scaled = B * self._inv_root_deg[:, None]
        out = np.empty((n, B.shape[1]))
        for i0 in range(0, n, self._block_rows):
            i1 = min(i0 + self._block_rows, n)
            block = gaussian_kernel_block(
                self._points[i0:i1], self._points, self._sigma
            )
            out[i0:i1] = block @ scaled
        out *= self._inv_root_deg[:, None]
        return out[:, 0] if single else out

    def __matmul__(self, B):
        return self.matmat(B)

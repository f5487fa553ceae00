"""Dense complex linear algebra kernel.

Everything operates on square or rectangular complex matrices represented
as ``numpy.ndarray`` with dtype ``complex128``.  All norms are the operator
2-norm (largest singular value) unless a function name says otherwise.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, Overflow, SingularMatrix

EPS = float(np.finfo(np.float64).eps)

# Dense eigen-solves get slow and memory-hungry past this point; raise the
# bound consciously rather than by accident.
MAX_DIMENSION = 512


def as_matrix(A, square=False):
    """Validate and return ``A`` as a finite complex128 matrix.

    Raises ValueError on non-2d input, non-finite entries, or dimensions
    above MAX_DIMENSION.
    """
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {M.ndim}")
    if M.shape[0] > MAX_DIMENSION or M.shape[1] > MAX_DIMENSION:
        raise ValueError(
            f"dimension {M.shape} exceeds MAX_DIMENSION = {MAX_DIMENSION}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    if square and M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def default_rank_tol(A):
    """Relative rank threshold n * eps for an n x m matrix."""
    return max(A.shape) * EPS


@dataclass(frozen=True)
class EigenData:
    """Spectrum of a square matrix.

    values are sorted by descending real part, then descending modulus,
    then descending argument, so repeated runs produce identical reports.
    backward_error is ||A - Z T Z*||_2 for the Schur factorization the
    values were read from.
    """

    values: np.ndarray
    backward_error: float


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^n.

    vectors has shape (dimension_ambient, k) with orthonormal columns;
    k = 0 is a valid (empty) basis.
    """

    dimension_ambient: int
    vectors: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[1]


def solve_linear(A, rhs):
    """Solve A X = rhs by pivoted LU factorization.

    Raises SingularMatrix when a pivot of U falls below
    n * eps * ||A||_inf, which is how resolvent evaluations at (numerical)
    spectrum points announce themselves.
    """
    A = as_matrix(A, square=True)
    rhs = as_matrix(rhs)
    n = A.shape[0]
    if rhs.shape[0] != n:
        raise ValueError(
            f"right-hand side has {rhs.shape[0]} rows, expected {n}")
    if n == 0:
        return rhs.copy()
    with warnings.catch_warnings():
        # exact singularity is detected below and raised as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    threshold = n * EPS * np.linalg.norm(A, np.inf)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) <= threshold:
        raise SingularMatrix(
            f"pivot {np.min(pivots):.3e} below threshold {threshold:.3e}")
    return scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)


def eigendecompose(A):
    """Eigenvalues with algebraic multiplicity, via a complex Schur form.

    The Schur route gives a computable backward-error certificate:
    A + E = Z T Z* exactly with ||E|| reported, at the usual
    O(n * eps * ||A||) size for a converged QR iteration.
    """
    A = as_matrix(A, square=True)
    if A.shape[0] == 0:
        return EigenData(values=np.zeros(0, dtype=np.complex128),
                         backward_error=0.0)
    try:
        T, Z = scipy.linalg.schur(A, output="complex")
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    values = np.diag(T).astype(np.complex128)
    order = np.lexsort((-np.angle(values), -np.abs(values), -values.real))
    backward = operator_norm(A - Z @ T @ Z.conj().T)
    return EigenData(values=values[order], backward_error=float(backward))


def numerical_rank(A, threshold):
    """Number of singular values strictly above an absolute threshold."""
    s = np.linalg.svd(as_matrix(A), compute_uv=False)
    return int(np.sum(s > threshold))


def kernel_basis(A, rank_tol=None):
    """Orthonormal basis of the numerical null space of A.

    Right singular vectors whose singular values are <= rank_tol * sigma_max
    (rank_tol defaults to n * eps).  An empty basis is a valid result.
    """
    A = as_matrix(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    m, n = A.shape
    _, s, Vh = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    # columns n-1 downto len(s) correspond to singular value 0 exactly
    mask = np.zeros(n, dtype=bool)
    mask[len(s):] = True
    mask[: len(s)] = s <= rank_tol * smax
    return SubspaceBasis(dimension_ambient=n, vectors=Vh.conj().T[:, mask])


def image_basis(A, rank_tol=None):
    """Orthonormal basis of the numerical column space of A (dual of kernel_basis)."""
    A = as_matrix(A)
    if rank_tol is None:
        rank_tol = default_rank_tol(A)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    U, s, _ = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    mask = np.zeros(U.shape[1], dtype=bool)
    mask[: len(s)] = s > rank_tol * smax
    return SubspaceBasis(dimension_ambient=A.shape[0], vectors=U[:, mask])


def matrix_exponential(B, t):
    """exp(t B) by scaling and squaring.

    Raises Overflow when entries leave the representable range.
    """
    B = as_matrix(B, square=True)
    t = float(t)
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(t * B)
    if not np.all(np.isfinite(E)):
        raise Overflow(f"exp({t} * B) overflowed")
    return E


def operator_norm(A):
    """Largest singular value of A."""
    A = as_matrix(A)
    if min(A.shape) == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_part_max_eig(T):
    """Largest eigenvalue of (T + T*)/2.

    In an inner-product space this equals max Re W(T), the rightmost point
    of the numerical range's real part.
    """
    T = as_matrix(T, square=True)
    if T.shape[0] == 0:
        return 0.0
    H = (T + T.conj().T) / 2.0
    return float(np.linalg.eigvalsh(H)[-1])

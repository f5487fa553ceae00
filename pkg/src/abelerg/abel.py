"""Abel and Cesaro averages of a matrix T, with their ergodic limits.

The discrete Abel average of T at parameter alpha in (0, 1) is

    A_alpha = (1 - alpha) (I - alpha T)^{-1},

the resolvent-weighted mean of the powers of T.  Powers of A_alpha either
converge to the projection onto Ker(I - T) along Im(I - T) or they do not
converge at all; this module computes the averages, iterates their powers
with a certificate of what happened, and builds that projection directly
from kernel/image bases so the two routes can be compared.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .errors import DecompositionFails, Overflow, PoleHit, ResolventPole, SingularMatrix

# Power growth past this norm is treated as divergence, not roundoff.
BLOW_UP_THRESHOLD = 1e8

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DOUBLINGS = 60


def check_alpha(alpha):
    """Validate alpha strictly inside (0, 1) and return it as float.

    Both endpoints are degenerate: alpha = 0 gives the identity, alpha = 1
    is the ergodic limit itself and is reachable only as a limit.
    """
    a = float(alpha)
    if not 0.0 < a < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha}")
    return a


@dataclass(frozen=True)
class RieszProjection:
    """Projection E onto Ker(I - T) along Im(I - T), with basis witnesses."""

    matrix: np.ndarray
    kernel: linalg.SubspaceBasis
    image: linalg.SubspaceBasis
    idempotency_defect: float


@dataclass
class ConvergenceReport:
    """Outcome of iterating the powers of a matrix by repeated squaring.

    steps is the exponent 2^k reached when convergence (or divergence) was
    declared.  history records (exponent, defect) pairs where defect is the
    Cauchy increment ||M^(2^(k+1)) - M^(2^k)||.  divergence_reason is
    "blow_up" or "no_cauchy" when converged is False.
    """

    converged: bool
    limit: Optional[np.ndarray]
    steps: int
    history: list = field(default_factory=list)
    divergence_reason: Optional[str] = None


def abel_average(T, alpha):
    """(1 - alpha) (I - alpha T)^{-1}.

    Raises ResolventPole when I - alpha T is numerically singular, i.e.
    1/alpha lies in the spectrum of T.
    """
    T = linalg.as_matrix(T, square=True)
    a = check_alpha(alpha)
    n = T.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    try:
        return linalg.solve_linear(eye - a * T, (1.0 - a) * eye)
    except SingularMatrix as exc:
        raise ResolventPole(
            f"1/alpha = {1.0 / a:.17g} lies in the numerical spectrum") from exc


def abel_series_partial(T, alpha, N):
    """Partial sum (1 - alpha) sum_{k=0}^{N} alpha^k T^k, Horner style."""
    T = linalg.as_matrix(T, square=True)
    a = check_alpha(alpha)
    N = int(N)
    if N < 0:
        raise ValueError("N must be >= 0")
    n = T.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    S = eye.copy()
    for _ in range(N):
        with np.errstate(over="ignore", invalid="ignore"):
            S = eye + a * (T @ S)
        if not np.all(np.isfinite(S)):
            raise Overflow("partial sums left the representable range")
    return (1.0 - a) * S


def _power_and_geometric_sum(T, N):
    """Return (T^N, sum_{k=0}^{N-1} T^k) using O(log N) multiplications."""
    n = T.shape[0]
    P = np.eye(n, dtype=np.complex128)
    S = np.zeros((n, n), dtype=np.complex128)
    for bit in bin(N)[2:]:
        with np.errstate(over="ignore", invalid="ignore"):
            S = S + P @ S
            P = P @ P
            if bit == "1":
                S = S + P
                P = P @ T
        if not (np.all(np.isfinite(S)) and np.all(np.isfinite(P))):
            raise Overflow("geometric sum left the representable range")
    return P, S


def cesaro_average(T, N):
    """Arithmetic mean N^{-1} sum_{n=0}^{N-1} T^n."""
    T = linalg.as_matrix(T, square=True)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    _, S = _power_and_geometric_sum(T, N)
    return S / N


def power_iterate(M, tol=DEFAULT_TOL, max_doublings=DEFAULT_MAX_DOUBLINGS):
    """Iterate M, M^2, M^4, ... until the sequence settles or escapes.

    Convergence requires three things at once: the Cauchy increment
    ||M^(2^(k+1)) - M^(2^k)|| <= tol, idempotency ||L^2 - L|| <= 10 tol of
    the candidate L, and the fixed-point identity ||M L - L|| <= 10 tol.
    The last two reject spurious fixed points of squaring (for instance a
    sign-alternating factor, whose even powers are constant).  Divergence
    is an in-band result: reason "blow_up" when any entry climbs past
    BLOW_UP_THRESHOLD, "no_cauchy" when the doubling budget runs out.
    """
    M = linalg.as_matrix(M, square=True)
    tol = float(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    history = []
    P = M.copy()
    exponent = 1
    for _ in range(int(max_doublings)):
        with np.errstate(over="ignore", invalid="ignore"):
            Q = P @ P
        if not np.all(np.isfinite(Q)) or np.max(np.abs(Q)) > BLOW_UP_THRESHOLD:
            history.append((exponent, float("inf")))
            return ConvergenceReport(
                converged=False, limit=None, steps=exponent,
                history=history, divergence_reason="blow_up")
        defect = linalg.operator_norm(Q - P)
        history.append((exponent, defect))
        if defect <= tol:
            idem = linalg.operator_norm(Q @ Q - Q)
            fixed = linalg.operator_norm(M @ Q - Q)
            if idem <= 10.0 * tol and fixed <= 10.0 * tol:
                return ConvergenceReport(
                    converged=True, limit=Q, steps=exponent, history=history)
        P = Q
        exponent *= 2
    return ConvergenceReport(
        converged=False, limit=None, steps=exponent, history=history,
        divergence_reason="no_cauchy")


def riesz_projection_at_one(T, rank_tol=None):
    """Projection onto Ker(I - T) along Im(I - T) from rank-revealing bases.

    Built by stacking orthonormal bases K of the kernel and V of the image
    of I - T and conjugating diag(I_k, 0) by [K V].  Fails loudly, with
    DecompositionFails, exactly when the two subspaces do not decompose the
    space: dimensions short of n, a singular stacked basis, or a projection
    whose idempotency defect exceeds 1e-8.
    """
    T = linalg.as_matrix(T, square=True)
    n = T.shape[0]
    M = np.eye(n, dtype=np.complex128) - T
    K = linalg.kernel_basis(M, rank_tol)
    V = linalg.image_basis(M, rank_tol)
    k, v = K.dim, V.dim
    if k + v != n:
        raise DecompositionFails(
            f"dim Ker(I-T) + dim Im(I-T) = {k} + {v} != {n}")
    W = np.hstack([K.vectors, V.vectors])
    s = np.linalg.svd(W, compute_uv=False)
    stack_tol = rank_tol if rank_tol is not None else linalg.default_rank_tol(W)
    if s[-1] <= stack_tol * s[0]:
        raise DecompositionFails(
            f"stacked kernel/image basis is numerically singular "
            f"(sigma_min/sigma_max = {s[-1] / s[0]:.3e})")
    Winv = linalg.solve_linear(W, np.eye(n, dtype=np.complex128))
    E = W[:, :k] @ Winv[:k, :]
    defect = linalg.operator_norm(E @ E - E)
    if defect > 1e-8:
        raise DecompositionFails(
            f"projection idempotency defect {defect:.3e} exceeds 1e-8")
    return RieszProjection(matrix=E, kernel=K, image=V,
                           idempotency_defect=float(defect))


def spectral_map(zeta, alpha):
    """The Moebius map f_alpha(zeta) = (1 - alpha) / (1 - alpha zeta).

    Sends the spectrum of T to the spectrum of its Abel average; maps the
    half-plane Re zeta <= 1 onto the closed disk |w - 1/2| <= 1/2 with the
    fixed point f_alpha(1) = 1.  Raises PoleHit within 1e-14 relative
    distance of the pole zeta = 1/alpha.
    """
    a = check_alpha(alpha)
    z = complex(zeta)
    pole = 1.0 / a
    if abs(z - pole) <= 1e-14 * abs(pole):
        raise PoleHit(f"zeta = {z} is the pole 1/alpha of the spectral map")
    return (1.0 - a) / (1.0 - a * z)


def in_omega_alpha(zeta, alpha):
    """Strict inequality |alpha zeta - 1| > 1 - alpha.

    The region where the spectral map takes values outside the closed unit
    disk; boundary points return False.
    """
    a = check_alpha(alpha)
    z = complex(zeta)
    return bool(abs(a * z - 1.0) > 1.0 - a)


def in_half_plane_pi(zeta, slack=0.0):
    """Re zeta <= 1 + slack."""
    slack = float(slack)
    if slack < 0:
        raise ValueError("slack must be >= 0")
    return bool(complex(zeta).real <= 1.0 + slack)


def alpha_sweep(T, alphas):
    """Diagnostic sweep of A_alpha along an increasing alpha grid.

    Returns one record per alpha with the norm of A_alpha and its distance
    to the previous grid point.  Whether the alpha -> 1 limit exists admits
    no finite stopping rule, so this reports raw data and no verdict.
    """
    T = linalg.as_matrix(T, square=True)
    out = []
    previous = None
    for a in sorted(float(x) for x in alphas):
        A = abel_average(T, a)
        entry = {
            "alpha": a,
            "norm": linalg.operator_norm(A),
            "step_from_previous": (
                linalg.operator_norm(A - previous) if previous is not None else None),
        }
        out.append(entry)
        previous = A
    return out

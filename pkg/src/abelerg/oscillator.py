"""Truncated diagonal model of the Hermite oscillator T = D^2 + (2 - t^2).

On L^2(R) this operator is diagonalized by the orthonormal Hermite
functions x_n(t) = h_n(t) exp(-t^2/2) with simple eigenvalues

    lambda_n = 1 - 2 n,        n = 0, 1, 2, ...

so the ergodic projection at the top eigenvalue lambda_0 = 1 is the rank
one projection P_0 onto the ground state.  The truncated model keeps the
first N_tr eigenvalues and represents vectors by their coefficient
sequences, which turns every resolvent quantity into explicit scalar
arithmetic:

    (lambda - 1) R(lambda, T)  has diagonal entries  (lambda-1)/(lambda-1+2n),

and the distance of its m-th power from P_0 is the largest such ratio to
the m-th power.  The grid functions below verify, independently of the
diagonal model, that the Hermite functions really are eigenfunctions of
the differential operator.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse, NotInComplement, PoleHit

DEFAULT_TRUNCATION = 10_000


@dataclass(frozen=True)
class DiagonalOscillator:
    """Spectral truncation keeping eigenvalues 1 - 2n for n < truncation."""

    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if int(self.truncation) != self.truncation or self.truncation < 2:
            raise ValueError("truncation must be an integer >= 2")

    def eigenvalues(self):
        return 1.0 - 2.0 * np.arange(self.truncation, dtype=np.float64)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a real function on a uniform grid [t_min, t_max]."""

    t_min: float
    t_max: float
    step: float
    samples: np.ndarray


@dataclass(frozen=True)
class GapReport:
    """Operator-norm distance of the scaled resolvent power from P_0.

    bound is the comparison value ((lambda-1)/(lambda+1))^(m-2) * C(lambda),
    available for m >= 4 (None below); the gap itself is exact on the
    truncated model.
    """

    gap: float
    bound: float


@dataclass(frozen=True)
class CConstant:
    """Truncated value of C(lambda) = sum_{n>=1} ((lambda-1)/(lambda-1+2n))^2.

    value is the sum over 1 <= n < truncation; tail_bound is the integral
    upper bound on the dropped remainder, so value <= C(lambda) <=
    value + tail_bound.
    """

    value: float
    tail_bound: float

    @property
    def estimate(self):
        return self.value + self.tail_bound


@dataclass(frozen=True)
class DecompositionWitness:
    """Preimage y with (I - T) y = x on the truncation, and its residual."""

    preimage: np.ndarray
    residual: float
    within_tolerance: bool


def _check_lambda_above_one(model, lam):
    lam = float(lam)
    if lam > 1.0:
        return lam
    eigs = model.eigenvalues()
    nearest = float(np.min(np.abs(lam - eigs)))
    if nearest <= 1e-12:
        raise PoleHit(f"lambda = {lam:.17g} hits an eigenvalue 1 - 2n")
    raise ValueError("the resolvent formulas require lambda > 1")


def _coeffs(model, x):
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size != model.truncation:
        raise ValueError(
            f"expected a coefficient vector of length {model.truncation}")
    if not np.all(np.isfinite(v)):
        raise ValueError("coefficients must be finite")
    return v


def resolvent_apply(model, lam, x):
    """Apply R(lambda, T): divide coefficient n by (lambda - 1 + 2n)."""
    lam = _check_lambda_above_one(model, lam)
    v = _coeffs(model, x)
    n = np.arange(model.truncation, dtype=np.float64)
    return v / (lam - 1.0 + 2.0 * n)


def _ratios(model, lam):
    n = np.arange(1, model.truncation, dtype=np.float64)
    return (lam - 1.0) / (lam - 1.0 + 2.0 * n)


def scaled_resolvent_power_gap(model, lam, m):
    """|| [(lambda - 1) R(lambda, T)]^m - P_0 || on the truncated model.

    Exact by diagonality: the supremum of ((lambda-1)/(lambda-1+2n))^m
    over n >= 1, attained at n = 1.
    """
    lam = _check_lambda_above_one(model, lam)
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    gap = float(np.max(_ratios(model, lam) ** m))
    bound = None
    if m >= 4:
        ratio = (lam - 1.0) / (lam + 1.0)
        bound = ratio ** (m - 2) * c_constant(model, lam).estimate
    return GapReport(gap=gap, bound=bound)


def first_order_gap(model, lam):
    """|| (lambda - 1) R(lambda, T) - P_0 || = (lambda-1)/(lambda+1).

    Always below the coarse bound lambda - 1, and tending to zero as
    lambda decreases to 1.
    """
    lam = _check_lambda_above_one(model, lam)
    return float(np.max(_ratios(model, lam)))


def c_constant(model, lam):
    """Truncated series C(lambda) with a certified integral tail bound."""
    lam = _check_lambda_above_one(model, lam)
    value = float(np.sum(_ratios(model, lam) ** 2))
    # sum_{n >= N} f(n) <= integral_{N-1}^inf f(u) du for decreasing f
    tail = (lam - 1.0) ** 2 / (2.0 * (lam - 3.0 + 2.0 * model.truncation))
    return CConstant(value=value, tail_bound=float(tail))


def hermite_function(n, t):
    """Orthonormal Hermite function x_n(t), stable for large n.

    Uses the normalized three-term recurrence

        x_0(t) = pi^(-1/4) exp(-t^2/2),
        x_{k+1}(t) = t sqrt(2/(k+1)) x_k(t) - sqrt(k/(k+1)) x_{k-1}(t),

    which keeps all intermediates of order one; the raw Hermite
    polynomials overflow near n = 300.  The pi^(-1/4) prefactor is forced
    by unit L^2 norm of the ground state.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    t = np.asarray(t, dtype=np.float64)
    x_prev = np.zeros_like(t)
    x = np.pi ** (-0.25) * np.exp(-0.5 * t * t)
    for k in range(n):
        x, x_prev = (t * np.sqrt(2.0 / (k + 1)) * x
                     - np.sqrt(k / (k + 1.0)) * x_prev), x
    return x if x.ndim else float(x)


def hermite_grid(n, t_min, t_max, step):
    """Sample x_n on a uniform grid, returned as a GridFunction."""
    t_min, t_max, step = float(t_min), float(t_max), float(step)
    if not (t_max > t_min and step > 0):
        raise ValueError("need t_max > t_min and step > 0")
    npts = int(round((t_max - t_min) / step)) + 1
    t = np.linspace(t_min, t_max, npts)
    return GridFunction(t_min=t_min, t_max=t_max, step=float(t[1] - t[0]),
                        samples=hermite_function(n, t))


def eigen_residual(n, step=1e-3, half_width=12.0):
    """Residual of (D^2 + 2 - t^2) x_n = (1 - 2n) x_n on a uniform grid.

    D^2 is the central second difference; the residual is the maximum over
    interior grid points and is expected to scale like step^2 times the
    fourth derivative of x_n.  Raises GridTooCoarse when it exceeds
    100 * step^2 * (2n + 3)^2.
    """
    n = int(n)
    if n < 0:
        raise ValueError("n must be >= 0")
    half_width = float(half_width)
    if half_width < np.sqrt(2.0 * n + 1.0) + 5.0:
        raise ValueError(
            "half_width must reach past the classical turning point: "
            f"need >= sqrt(2n+1) + 5 = {np.sqrt(2.0 * n + 1.0) + 5.0:.2f}")
    grid = hermite_grid(n, -half_width, half_width, step)
    t = np.linspace(grid.t_min, grid.t_max, grid.samples.size)
    h = grid.step
    x = grid.samples
    second = (x[:-2] - 2.0 * x[1:-1] + x[2:]) / (h * h)
    interior = slice(1, -1)
    residual = second + (2.0 - t[interior] ** 2) * x[interior] \
        - (1.0 - 2.0 * n) * x[interior]
    worst = float(np.max(np.abs(residual)))
    budget = 100.0 * h * h * (2.0 * n + 3.0) ** 2
    if worst > budget:
        raise GridTooCoarse(
            f"residual {worst:.3e} exceeds budget {budget:.3e} at step {h}")
    return worst


def kernel_image_decomposition_check(model, x):
    """Solve (I - T) y = x explicitly for x with no ground-state component.

    On the truncation I - T acts diagonally as multiplication by 2n, so
    y_n = x_n / (2n) for n >= 1 and the n = 0 slot must be empty: a
    ground-state component of relative size above 1e-12 raises
    NotInComplement.
    """
    v = _coeffs(model, x)
    scale = float(np.linalg.norm(v))
    if abs(v[0]) > 1e-12 * scale:
        raise NotInComplement(
            f"|x_0| = {abs(v[0]):.3e} exceeds 1e-12 * ||x||")
    n = np.arange(model.truncation, dtype=np.float64)
    y = np.zeros_like(v)
    y[1:] = v[1:] / (2.0 * n[1:])
    reconstructed = 2.0 * n * y
    residual = float(np.linalg.norm(reconstructed - v))
    return DecompositionWitness(
        preimage=y, residual=residual,
        within_tolerance=bool(residual <= 1e-12 * scale))

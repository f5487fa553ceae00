import numpy as np
import pytest

from abelerg import abel
from abelerg.errors import DecompositionFails, Overflow, PoleHit, ResolventPole


def jordan_block():
    return np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128)


def convergent_diag():
    return np.diag([1.0, 2.0 / 3.0]).astype(np.complex128)


def random_contraction(rng, n, radius=0.9):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return radius * M / np.linalg.norm(M, 2)


def test_check_alpha_bounds():
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            abel.check_alpha(bad)
    assert abel.check_alpha(0.5) == 0.5


def test_abel_average_of_zero_operator():
    # A_alpha(0) = (1 - alpha) I
    for a in (0.1, 0.5, 0.9):
        A = abel.abel_average(np.zeros((3, 3)), a)
        assert np.allclose(A, (1.0 - a) * np.eye(3), atol=1e-15)


def test_abel_average_jordan_block_is_fixed():
    # the shear [[1,1],[0,1]] satisfies A_{1/2} = T exactly
    A = abel.abel_average(jordan_block(), 0.5)
    assert np.max(np.abs(A - jordan_block())) <= 1e-14


def test_abel_average_pole_detection():
    # alpha T has eigenvalue exactly 1/alpha * alpha = 1 when T = 2 I, alpha = 1/2
    with pytest.raises(ResolventPole):
        abel.abel_average(2.0 * np.eye(2), 0.5)


def test_abel_series_partial_identity_oracle():
    # T = I, alpha = 1/2, top power N = 3:
    # (1/2)(1 + 1/2 + 1/4 + 1/8) = 1 - (1/2)^4 = 15/16
    S = abel.abel_series_partial(np.eye(2), 0.5, 3)
    assert np.allclose(S, 0.9375 * np.eye(2), atol=1e-15)
    # T = 0: only the k = 0 term survives for any N
    S0 = abel.abel_series_partial(np.zeros((2, 2)), 0.5, 10)
    assert np.allclose(S0, 0.5 * np.eye(2), atol=1e-15)


def test_abel_series_converges_to_average():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        T = random_contraction(rng, n)
        a = float(rng.uniform(0.1, 0.9))
        A = abel.abel_average(T, a)
        S = abel.abel_series_partial(T, a, 800)
        assert np.linalg.norm(S - A, 2) <= 1e-10


def test_cesaro_small_cases_match_direct_sum():
    rng = np.random.default_rng(9)
    T = random_contraction(rng, 4)
    for N in (1, 2, 3, 7):
        direct = sum(np.linalg.matrix_power(T, k) for k in range(N)) / N
        assert np.allclose(abel.cesaro_average(T, N), direct, atol=1e-13)


def test_cesaro_flip_operator_alternates():
    # T = [[-1]]: partial sums alternate 1, 0, 1, 0, ... so C_N = 1/N or 0
    T = np.array([[-1.0]])
    assert abs(abel.cesaro_average(T, 2)[0, 0]) <= 1e-15
    assert abs(abel.cesaro_average(T, 5)[0, 0] - 0.2) <= 1e-15


def test_cesaro_large_n_projects_convergent_instance():
    T = convergent_diag()
    C = abel.cesaro_average(T, 100_000)
    assert np.linalg.norm(C - np.diag([1.0, 0.0]), 2) <= 1e-4


def test_power_iterate_projection_oracle():
    # powers of A_alpha(diag(1, 2/3)) converge to diag(1, 0)
    rep = abel.power_iterate(abel.abel_average(convergent_diag(), 0.5))
    assert rep.converged
    assert rep.divergence_reason is None
    assert np.max(np.abs(rep.limit - np.diag([1.0, 0.0]))) <= 1e-9
    # history defects decay and exponents double
    exponents = [e for e, _ in rep.history]
    assert exponents == [2 ** k for k in range(len(exponents))]


def test_power_iterate_limit_is_projection():
    rng = np.random.default_rng(17)
    for _ in range(15):
        n = int(rng.integers(2, 10))
        T = random_contraction(rng, n)
        rep = abel.power_iterate(abel.abel_average(T, 0.5))
        assert rep.converged
        # 1 is not in the spectrum, so the projection is 0
        assert np.linalg.norm(rep.limit, 2) <= 1e-9
        assert np.linalg.norm(rep.limit @ rep.limit - rep.limit, 2) <= 1e-8


def test_power_iterate_jordan_diverges():
    rep = abel.power_iterate(abel.abel_average(jordan_block(), 0.5))
    assert not rep.converged
    assert rep.divergence_reason in ("blow_up", "no_cauchy")
    assert rep.limit is None


def test_power_iterate_rotation_never_cauchy():
    # unimodular non-identity eigenvalues: bounded powers, no limit
    theta = 2.0
    R = np.array([[np.cos(theta), -np.sin(theta)],
                  [np.sin(theta), np.cos(theta)]])
    rep = abel.power_iterate(R, tol=1e-10, max_doublings=30)
    assert not rep.converged
    assert rep.divergence_reason == "no_cauchy"


def test_riesz_projection_diag_oracle():
    proj = abel.riesz_projection_at_one(convergent_diag())
    assert np.allclose(proj.matrix, np.diag([1.0, 0.0]), atol=1e-12)
    assert proj.kernel.dim == 1
    assert proj.image.dim == 1
    assert proj.idempotency_defect <= 1e-12


def test_riesz_projection_no_eigenvalue_one_gives_zero():
    rng = np.random.default_rng(21)
    T = random_contraction(rng, 5)
    proj = abel.riesz_projection_at_one(T)
    assert proj.kernel.dim == 0
    assert np.linalg.norm(proj.matrix, 2) <= 1e-12


def test_riesz_projection_jordan_fails():
    with pytest.raises(DecompositionFails):
        abel.riesz_projection_at_one(jordan_block())


def test_riesz_projection_commutes_and_projects():
    rng = np.random.default_rng(33)
    for _ in range(10):
        n = int(rng.integers(3, 9))
        # block diag: eigenvalue 1 of multiplicity 2 plus a contraction
        T = np.zeros((n, n), dtype=np.complex128)
        T[0, 0] = T[1, 1] = 1.0
        T[2:, 2:] = random_contraction(rng, n - 2, radius=0.8)
        W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        Q, _ = np.linalg.qr(W)
        T = Q @ T @ Q.conj().T
        proj = abel.riesz_projection_at_one(T)
        E = proj.matrix
        assert np.linalg.norm(E @ E - E, 2) <= 1e-9
        assert np.linalg.norm(T @ E - E, 2) <= 1e-9
        assert np.linalg.norm(E @ T - E, 2) <= 1e-9


def test_spectral_map_values():
    # f_{1/2}(0) = 1/2, f_alpha(1) = 1 for every alpha
    assert abs(abel.spectral_map(0.0, 0.5) - 0.5) <= 1e-15
    for a in (0.1, 0.5, 0.9):
        assert abs(abel.spectral_map(1.0, a) - 1.0) <= 1e-15
    with pytest.raises(PoleHit):
        abel.spectral_map(2.0, 0.5)


def test_spectral_map_matches_abel_spectrum():
    rng = np.random.default_rng(29)
    for _ in range(10):
        n = int(rng.integers(2, 8))
        T = random_contraction(rng, n)
        a = float(rng.uniform(0.1, 0.9))
        A = abel.abel_average(T, a)
        spec_T = np.linalg.eigvals(T)
        spec_A = np.linalg.eigvals(A)
        mapped = np.array([abel.spectral_map(z, a) for z in spec_T])
        assert np.allclose(np.sort_complex(mapped), np.sort_complex(spec_A),
                           atol=1e-8)


def test_omega_alpha_is_where_map_contracts():
    # zeta in Omega_alpha exactly when |f_alpha(zeta)| < 1; the half-plane
    # Pi minus its boundary point 1 always sits inside Omega_alpha
    rng = np.random.default_rng(31)
    for _ in range(200):
        zeta = complex(rng.normal(scale=2.0), rng.normal(scale=2.0))
        a = float(rng.uniform(0.1, 0.9))
        if abs(zeta - 1.0 / a) <= 1e-8:
            continue
        w = abel.spectral_map(zeta, a)
        assert abel.in_omega_alpha(zeta, a) == (abs(w) < 1.0)
        if abel.in_half_plane_pi(zeta) and abs(zeta - 1.0) > 1e-9:
            assert abel.in_omega_alpha(zeta, a)


def test_half_plane_membership():
    assert abel.in_half_plane_pi(1.0)
    assert abel.in_half_plane_pi(0.5 + 10.0j)
    assert not abel.in_half_plane_pi(1.0 + 1e-6)
    assert abel.in_half_plane_pi(1.0 + 1e-6, slack=1e-5)


def test_alpha_sweep_reports_monotone_grid():
    T = convergent_diag()
    rows = abel.alpha_sweep(T, (0.1, 0.5, 0.9))
    assert [r["alpha"] for r in rows] == [0.1, 0.5, 0.9]
    assert all(np.isfinite(r["norm"]) for r in rows)
    assert rows[0]["step_from_previous"] is None


def test_series_partial_overflow_guard():
    T = 3.0 * np.eye(2)
    with pytest.raises(Overflow):
        abel.abel_series_partial(T, 0.9, 5000)

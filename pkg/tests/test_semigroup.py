import math

import numpy as np
import pytest
import scipy.special

from abelerg import semigroup
from abelerg.errors import IntegralDiverges, PoleHit, ResolventPole


def stable_generator(rng, n, lam=1.0):
    # eigenvalues scaled to the resolvent parameter keep the quadrature
    # decay ratio |Re mu| / lambda within [0.1, 1]
    re = rng.uniform(-1.0, -0.1, n) * lam
    im = rng.uniform(-0.4, 0.4, n) * lam
    W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q1, _ = np.linalg.qr(W)
    W2 = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q2, _ = np.linalg.qr(W2)
    cond = 10.0 ** rng.uniform(0.0, 1.0)
    S = Q1 @ np.diag(np.logspace(0.0, np.log10(cond), n)) @ Q2
    return S @ np.diag(re + 1j * im) @ np.linalg.inv(S)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        semigroup.QuadratureSpec(node_count=4)
    with pytest.raises(ValueError):
        semigroup.QuadratureSpec(t_max_factor=2.0)
    with pytest.raises(ValueError):
        semigroup.QuadratureSpec(scheme="monte_carlo")


def test_laguerre_rule_weights_sum_to_one():
    for p in (0.0, 1.0, 3.0, 7.0, 31.0):
        nodes, weights = semigroup.laguerre_rule(64, power=p)
        assert abs(weights.sum() - 1.0) <= 1e-13
        assert np.all(nodes > 0.0)
        assert np.all(np.diff(nodes) > 0.0)


def test_laguerre_rule_matches_scipy_reference():
    for p in (0.0, 2.0, 5.0):
        nodes, weights = semigroup.laguerre_rule(32, power=p)
        ref_nodes, ref_weights = scipy.special.roots_genlaguerre(32, p)
        assert np.allclose(nodes, ref_nodes, rtol=1e-12, atol=1e-12)
        assert np.allclose(weights, ref_weights / scipy.special.gamma(p + 1.0),
                           rtol=1e-11, atol=1e-15)


def test_laguerre_rule_integrates_monomials_exactly():
    # integral of u^k u^p e^(-u) / Gamma(p+1) is the rising product
    # (p+1)(p+2)...(p+k), exact for Gaussian rules up to degree 2m-1
    nodes, weights = semigroup.laguerre_rule(16, power=2.0)
    value = 1.0
    for k in range(1, 12):
        value *= 2.0 + k
        quad = float(weights @ nodes ** k)
        assert abs(quad - value) <= 1e-12 * value


def test_semigroup_at_nilpotent_closed_form():
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    for t in (0.0, 1.0, 4.5):
        assert np.allclose(semigroup.semigroup_at(B, t),
                           [[1.0, t], [0.0, 1.0]], atol=1e-14)
    with pytest.raises(ValueError):
        semigroup.semigroup_at(B, -1.0)


def test_abel_average_closed_scalar_oracle():
    # B = [[-1]], lambda = 1: average is 1/(1+1) = 1/2
    A = semigroup.abel_average_closed(np.array([[-1.0]]), 1.0)
    assert abs(A[0, 0] - 0.5) <= 1e-15


def test_abel_average_closed_pole():
    with pytest.raises(ResolventPole):
        semigroup.abel_average_closed(np.array([[2.0]]), 2.0)
    with pytest.raises(ValueError):
        semigroup.abel_average_closed(np.array([[-1.0]]), 0.0)


def test_quadrature_matches_closed_form():
    rng = np.random.default_rng(101)
    for lam in (0.1, 1.0, 10.0):
        for _ in range(5):
            n = int(rng.integers(2, 6))
            B = stable_generator(rng, n, lam)
            closed = semigroup.abel_average_closed(B, lam)
            quad = semigroup.abel_average_quadrature(B, lam)
            rel = np.linalg.norm(quad - closed, 2) / np.linalg.norm(closed, 2)
            assert rel <= 1e-8


def test_quadrature_simpson_scheme_agrees():
    rng = np.random.default_rng(103)
    B = stable_generator(rng, 3)
    spec = semigroup.QuadratureSpec(node_count=400,
                                    scheme=semigroup.SCHEME_TRUNCATED_SIMPSON)
    closed = semigroup.abel_average_closed(B, 1.0)
    quad = semigroup.abel_average_quadrature(B, 1.0, spec)
    rel = np.linalg.norm(quad - closed, 2) / np.linalg.norm(closed, 2)
    assert rel <= 1e-6


def test_quadrature_unstable_generator_rejected():
    # spectral abscissa above lambda: the improper integral diverges
    with pytest.raises(IntegralDiverges):
        semigroup.abel_average_quadrature(np.array([[0.5]]), 0.25)


def test_power_quadrature_scalar_oracle():
    # B = [[-1]], lambda = 1, n = 3: (1/(1+1))^3 = 1/8
    P = semigroup.abel_power_quadrature(np.array([[-1.0]]), 1.0, 3)
    assert abs(P[0, 0] - 0.125) <= 1e-12


def test_power_quadrature_matches_matrix_power():
    rng = np.random.default_rng(107)
    B = stable_generator(rng, 4)
    closed = semigroup.abel_average_closed(B, 1.0)
    for n in (1, 2, 4, 8):
        P = semigroup.abel_power_quadrature(B, 1.0, n)
        ref = np.linalg.matrix_power(closed, n)
        rel = np.linalg.norm(P - ref, 2) / np.linalg.norm(ref, 2)
        assert rel <= 1e-8


def test_discrete_bridge_is_algebraic_identity():
    rng = np.random.default_rng(109)
    for _ in range(10):
        n = int(rng.integers(2, 7))
        B = stable_generator(rng, n)
        lam = float(10.0 ** rng.uniform(-1.0, 1.0))
        rep = semigroup.discrete_bridge(B, lam)
        assert rep.relative_defect <= 1e-12
        assert abs(rep.alpha - 1.0 / (1.0 + lam)) <= 1e-15


def test_growth_log_norm_stable_generator_decays():
    rng = np.random.default_rng(113)
    B = stable_generator(rng, 4)
    rep = semigroup.growth_log_norm(B, (1.0, 10.0, 50.0, 100.0, 200.0))
    assert rep.spectral_bound < 0.0
    assert rep.overflow_at is None
    # sampled rate approaches the spectral bound from above
    assert rep.samples[-1][1] <= rep.samples[0][1] + 1e-12


def test_growth_log_norm_unstable_flags_positive_rate():
    B = np.array([[1.0]])
    rep = semigroup.growth_log_norm(B, (1.0, 2.0, 4.0))
    assert not rep.heuristic_holds
    assert abs(rep.samples[-1][1] - 1.0) <= 1e-12


def test_growth_log_norm_grid_validation():
    B = np.array([[-1.0]])
    with pytest.raises(ValueError):
        semigroup.growth_log_norm(B, (2.0, 1.0))
    with pytest.raises(ValueError):
        semigroup.growth_log_norm(B, (0.0, 1.0))


def test_ergodic_projection_kernel_of_generator():
    rng = np.random.default_rng(127)
    # B with a one-dimensional kernel: limit projects onto it
    n = 5
    B = np.zeros((n, n), dtype=np.complex128)
    B[1:, 1:] = stable_generator(rng, n - 1)
    W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, _ = np.linalg.qr(W)
    B = Q @ B @ Q.conj().T
    rep = semigroup.ergodic_projection_continuous(B, 1.0)
    assert rep.report.converged
    assert rep.projects_onto_kernel
    assert rep.kernel_residual <= 1e-8
    L = rep.report.limit
    assert np.linalg.norm(L @ L - L, 2) <= 1e-8
    assert abs(np.trace(L) - 1.0) <= 1e-8


def test_ergodic_projection_shift_generator_diverges_cleanly():
    # B = [[0,1],[0,0]]: 0 is a defective eigenvalue of the generator,
    # the scaled resolvent has a Jordan block at 1 and powers blow up
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    rep = semigroup.ergodic_projection_continuous(B, 1.0)
    assert not rep.report.converged
    assert not rep.projects_onto_kernel
    assert rep.kernel_residual is None

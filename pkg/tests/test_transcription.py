"""Tests for the discretized path solver and its exponential-Euler step."""

import numpy as np
import pytest

from conftest import random_hermitian, random_psd, random_skew

from denflow.geodesic import InfeasibleError, eval_path, path_cost, solve_geodesic
from denflow.linalg import expm_skew, frob_norm
from denflow.transcription import DiscretePath, discrete_cost, solve_discrete_path, step


def build_constant_path(rho0, X, Z, N, conjugate=True):
    """Compose N equal steps with constant X and (optionally conjugated) drift."""
    n = rho0.shape[0]
    dt = 1.0 / N
    states = np.empty((N + 1, n, n), dtype=complex)
    us = np.empty((N, n, n), dtype=complex)
    Xs = np.broadcast_to(X, (N, n, n)).copy()
    states[0] = rho0
    for k in range(N):
        t = k * dt
        if conjugate:
            U = expm_skew(X * t)
            u_raw = U @ Z @ U.conj().T
        else:
            u_raw = Z
        states[k + 1], us[k] = step(states[k], Xs[k], u_raw, dt)
    return states, Xs, us


def as_path(rho0, rho1, X, Z, N, conjugate=True):
    states, Xs, us = build_constant_path(rho0, X, Z, N, conjugate=conjugate)
    return DiscretePath(
        N=N, dt=1.0 / N, states=states, Xs=Xs, us=us, cost=0.0,
        endpoint_residual=float(frob_norm(states[N] - rho1)),
        converged=True, rounds=1, objective_trace=((0.0,),),
    )


class TestStep:
    def test_pure_rotation_preserves_spectrum(self):
        rng = np.random.default_rng(7)
        rho = random_psd(rng, 3)
        X = random_skew(rng, 3)
        rho_next, u_used = step(rho, X, np.zeros((3, 3)), 0.05)
        assert frob_norm(u_used) <= 1e-12
        before = np.sort(np.linalg.eigvalsh(rho))
        after = np.sort(np.linalg.eigvalsh(rho_next))
        assert np.max(np.abs(before - after)) <= 1e-10

    def test_pure_drift_moves_eigenvalues_linearly(self):
        rho = np.diag([1.0, 0.0]).astype(complex)
        u_raw = np.diag([-1.0, 1.0]).astype(complex)
        rho_next, u_used = step(rho, np.zeros((2, 2)), u_raw, 0.1)
        assert np.allclose(rho_next, np.diag([0.9, 0.1]), atol=1e-14)
        assert np.allclose(u_used, u_raw, atol=1e-14)

    def test_projection_strips_noncommuting_part(self):
        rho = np.diag([2.0, 1.0]).astype(complex)
        u_raw = np.array([[0.5, 1.0], [1.0, -0.5]], dtype=complex)
        _, u_used = step(rho, np.zeros((2, 2)), u_raw, 0.01)
        assert np.allclose(u_used, np.diag([0.5, -0.5]), atol=1e-12)
        assert abs(np.trace(u_used)) <= 1e-12

    def test_composition_matches_closed_form_path(self):
        # with the drift conjugated along the rotation, the discrete steps
        # reproduce the continuous interpolation path exactly
        rho0 = np.diag([1.0, 0.1]).astype(complex)
        rho1 = np.array([[0.4, 0.3], [0.3, 0.7]], dtype=complex)
        sol = solve_geodesic(rho0, rho1, 1.0)
        N = 1000
        states, _, _ = build_constant_path(rho0, sol.X, sol.Z, N)
        for t in (0.25, 0.5, 1.0):
            k = int(round(t * N))
            assert frob_norm(states[k] - eval_path(sol, rho0, t)) <= 1e-4

    def test_trace_preserved_by_construction(self):
        rng = np.random.default_rng(3)
        rho = random_psd(rng, 3)
        rho = rho + 0.1 * np.eye(3)
        X = random_skew(rng, 3)
        u_raw = random_hermitian(rng, 3)
        u_raw = u_raw - (np.trace(u_raw) / 3) * np.eye(3)
        tr = np.trace(rho).real
        for _ in range(20):
            rho, _ = step(rho, X, u_raw, 0.05)
        assert abs(np.trace(rho).real - tr) <= 1e-12


class TestDiscreteCost:
    def test_zero_controls_cost_zero(self):
        rho0 = np.diag([0.6, 0.4]).astype(complex)
        path = as_path(rho0, rho0, np.zeros((2, 2)), np.zeros((2, 2)), 10)
        assert discrete_cost(path, 1.0) == 0.0

    def test_constant_controls_match_continuous_cost(self):
        rho0 = np.diag([1.0, 0.1]).astype(complex)
        rho1 = np.array([[0.4, 0.3], [0.3, 0.7]], dtype=complex)
        for eps in (0.5, 2.0):
            sol = solve_geodesic(rho0, rho1, eps)
            path = as_path(rho0, rho1, sol.X, sol.Z, 50)
            expect = path_cost(sol.X, sol.Z, eps).total
            assert abs(discrete_cost(path, eps) - expect) <= 1e-9

    def test_doubling_steps_leaves_cost_unchanged(self):
        rho0 = np.diag([1.0, 0.1]).astype(complex)
        rho1 = np.diag([0.1, 1.0]).astype(complex)
        sol = solve_geodesic(rho0, rho1, 1.0)
        c1 = discrete_cost(as_path(rho0, rho1, sol.X, sol.Z, 50), 1.0)
        c2 = discrete_cost(as_path(rho0, rho1, sol.X, sol.Z, 100), 1.0)
        assert abs(c1 - c2) <= 1e-9


class TestSolver:
    def test_identical_endpoints_zero_cost(self):
        rho = np.diag([0.7, 0.3]).astype(complex)
        path = solve_discrete_path(rho, rho, 1.0, steps=10)
        assert path.converged
        assert path.cost <= 1e-8
        assert path.endpoint_residual <= 1e-10

    @pytest.mark.parametrize("eps", [0.1, 1.0, 10.0])
    def test_matches_constant_control_cost(self, eps):
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        rho1 = np.diag([0.0, 1.0]).astype(complex)
        base = solve_geodesic(rho0, rho1, eps)
        path = solve_discrete_path(rho0, rho1, eps)
        assert path.converged
        assert path.endpoint_residual <= 1e-4
        assert path.cost <= base.cost_total + 1e-2
        # accepted objective values never increase within a round
        for trace in path.objective_trace:
            assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_small_epsilon_uses_pure_scaling(self):
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        rho1 = np.diag([0.0, 1.0]).astype(complex)
        path = solve_discrete_path(rho0, rho1, 0.1)
        rotation_cost = float(np.linalg.norm(path.Xs, axis=(1, 2)).sum() * path.dt)
        assert rotation_cost <= 0.05

    def test_path_invariants(self):
        rho0 = np.diag([1.0, 0.1]).astype(complex)
        rho1 = np.array([[0.4, 0.3], [0.3, 0.7]], dtype=complex)
        path = solve_discrete_path(rho0, rho1, 1.0, steps=20)
        tr = np.trace(rho0).real
        for k in range(path.N):
            rho, u = path.states[k], path.us[k]
            assert frob_norm(rho @ u - u @ rho) <= 1e-8
            assert abs(np.trace(u)) <= 1e-10
            assert abs(np.trace(path.states[k + 1]).real - tr) <= 1e-9
            # states come from the step map applied to the stored controls
            rebuilt, _ = step(rho, path.Xs[k], path.us[k], path.dt)
            assert frob_norm(rebuilt - path.states[k + 1]) <= 1e-12
        mins = np.linalg.eigvalsh(path.states).min(axis=1)
        assert mins.min() >= -1e-8

    def test_refinement_converges_first_order(self):
        # a genuinely state-dependent drift (constant raw control that does
        # not commute with the rotating state) so the scheme's O(dt) error
        # is visible; halving dt should shrink it with slope close to 1
        rho0 = np.diag([1.0, 0.3]).astype(complex)
        X = np.array([[0.0, -0.8], [0.8, 0.0]], dtype=complex)
        Z = np.diag([-0.2, 0.2]).astype(complex)
        ref, _, _ = build_constant_path(rho0, X, Z, 4096, conjugate=False)
        errs = []
        for N in (64, 128, 256):
            states, _, _ = build_constant_path(rho0, X, Z, N, conjugate=False)
            errs.append(frob_norm(states[N] - ref[4096]))
        slopes = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(slopes >= 0.9)

    def test_non_converged_flag(self):
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        rho1 = np.diag([0.0, 1.0]).astype(complex)
        path = solve_discrete_path(rho0, rho1, 10.0, tol_end=0.0, max_iters=0)
        assert not path.converged
        assert path.rounds == 12
        assert np.isfinite(path.cost)

    def test_trace_mismatch_rejected(self):
        rho0 = np.diag([1.0, 0.0]).astype(complex)
        rho1 = np.diag([1.0, 0.5]).astype(complex)
        with pytest.raises(InfeasibleError):
            solve_discrete_path(rho0, rho1, 1.0)

    def test_too_few_steps_rejected(self):
        rho = np.diag([0.5, 0.5]).astype(complex)
        with pytest.raises(ValueError):
            solve_discrete_path(rho, rho, 1.0, steps=1)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infospace.classical import (
    BoundaryEscapeError,
    PhaseState,
    Potential,
    Trajectory,
    hamiltonian,
    integrate_trajectory,
    potential_energy,
    potential_force,
    theta_velocity,
    time_reversal_error,
)
from infospace.errors import DomainError
from infospace.quantum import PhysicalParams

P = PhysicalParams(m=8.0, k=8.0)
TAGS = list(Potential)


def turning_points(traj):
    """Local extrema of q, refined by a parabola through neighbouring samples."""
    q = traj.q
    out = []
    for i in range(1, len(q) - 1):
        if (q[i] - q[i - 1]) * (q[i + 1] - q[i]) < 0:
            a, b, c = q[i - 1], q[i], q[i + 1]
            denom = a - 2 * b + c
            out.append(b - (a - c) ** 2 / (8 * denom) if denom else b)
    return np.array(out)


class TestHamiltonian:
    def test_free_example(self):
        assert hamiltonian(PhaseState(0.5, 2.0), PhysicalParams(m=1.0), "free") == 0.5

    @pytest.mark.parametrize("tag", TAGS)
    def test_rest_at_anchor(self, tag):
        assert hamiltonian(PhaseState(0.5, 0.0), P, tag) == 0.0

    def test_kl_quadratic_example(self):
        assert hamiltonian(PhaseState(0.25, 0.0), P, "kl_quadratic") == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("tag", TAGS)
    @given(q=st.floats(0.05, 0.95))
    def test_force_is_minus_gradient(self, tag, q):
        h = 1e-6
        grad = (potential_energy(q + h, P, tag) - potential_energy(q - h, P, tag)) / (2 * h)
        assert potential_force(q, P, tag) == pytest.approx(-grad, abs=1e-6)

    def test_bad_state(self):
        with pytest.raises(DomainError):
            PhaseState(1.0, 0.0)
        with pytest.raises(DomainError):
            PhaseState(0.5, math.inf)

    def test_trajectory_timestamps(self):
        s = PhaseState(0.5, 0.0, 1.0)
        with pytest.raises(DomainError):
            Trajectory((s, s), Potential.FREE, P)


class TestMotion:
    def test_free_theta_velocity_constant(self):
        traj = integrate_trajectory(PhaseState(0.5, 1.0), P, "free", 2.0, n_samples=101)
        v = np.array([theta_velocity(s, P) for s in traj.samples])
        assert np.max(np.abs(v - v[0])) < 1e-10
        # and theta advances linearly
        theta = 2 * np.arcsin(np.sqrt(traj.q))
        np.testing.assert_allclose(theta, theta[0] + v[0] * traj.t, atol=1e-9)

    def test_symmetric_oscillation(self):
        traj = integrate_trajectory(PhaseState(0.6, 0.0), P, "kl_quadratic", 30.0, n_samples=30001)
        tp = turning_points(traj)
        assert len(tp) >= 3
        assert np.all(np.abs(tp - 0.5) == pytest.approx(0.1, abs=1e-6))
        assert np.all(np.abs(traj.q - 0.5) <= 0.1 + 1e-9)

    @pytest.mark.parametrize("tag", TAGS)
    def test_equilibrium(self, tag):
        traj = integrate_trajectory(PhaseState(0.5, 0.0), P, tag, 10.0, n_samples=11)
        assert np.all(traj.q == 0.5) and np.all(traj.p == 0.0)

    @pytest.mark.parametrize("tag,s0", [
        ("free", PhaseState(0.5, 0.2)),  # reaches the boundary at t = 8 pi when p0 = 1
        ("kl", PhaseState(0.3, 0.5)),
        ("kl_quadratic", PhaseState(0.6, 0.0)),
        ("geodesic", PhaseState(0.2, -1.0)),
    ])
    def test_conservation_and_reversal(self, tag, s0):
        traj = integrate_trajectory(s0, P, tag, 100.0)
        H = traj.energies()
        scale = max(abs(H[0]), 1e-300)
        assert np.max(np.abs(H - H[0])) / scale <= 1e-8
        assert time_reversal_error(s0, P, tag, 100.0) <= 1e-6

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.35, 0.65), st.floats(-0.5, 0.5))
    def test_conservation_random(self, q0, p0):
        traj = integrate_trajectory(PhaseState(q0, p0), P, "kl", 20.0, n_samples=11)
        H = traj.energies()
        assert np.max(np.abs(H - H[0])) <= 1e-8 * max(H[0], 1e-12)

    def test_kl_matches_quadratic_at_double_stiffness(self):
        # D_KL(1/2, q) = 2 (q - 1/2)^2 + O((q - 1/2)^4)
        s0 = PhaseState(0.501, 0.0)
        a = integrate_trajectory(s0, P, "kl", 10.0, n_samples=201)
        b = integrate_trajectory(s0, PhysicalParams(m=8.0, k=16.0), "kl_quadratic", 10.0, n_samples=201)
        assert np.max(np.abs(a.q - b.q)) < 1e-7

    def test_boundary_escape(self):
        with pytest.raises(BoundaryEscapeError) as info:
            integrate_trajectory(PhaseState(0.5, 50.0), P, "free", 100.0)
        err = info.value
        assert 0 < err.last_state.q < 1
        assert len(err.partial) >= 1
        assert err.partial.t[-1] < 100.0

    def test_bad_duration(self):
        with pytest.raises(DomainError):
            integrate_trajectory(PhaseState(0.5, 0.0), P, "free", 0.0)

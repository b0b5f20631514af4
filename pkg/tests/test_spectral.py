import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infospace.errors import DomainError
from infospace.numerics import integrate_weighted
from infospace.spectral import (
    DecayLaw,
    EigenMode,
    SpectralExpansion,
    evaluate,
    expand,
    greens_closed,
    greens_series,
    heat_evolve,
    laplace_beltrami,
    psi,
    wave_evolve,
)

SQRT_2_PI = math.sqrt(2 / math.pi)


def theta_midpoint(g, n=200_000):
    """Independent oracle: midpoint rule for int_0^pi g(theta) d theta."""
    th = (np.arange(n) + 0.5) * math.pi / n
    return float(np.sum(g(th)) * math.pi / n)


class TestPsi:
    def test_center(self):
        assert psi(1, 0.5) == pytest.approx(SQRT_2_PI, rel=1e-15)
        assert SQRT_2_PI == pytest.approx(0.7979, abs=1e-4)

    def test_second_mode_center_node(self):
        assert abs(psi(2, 0.5)) < 1e-15

    def test_dirichlet(self):
        assert abs(psi(3, 1e-14)) < 1e-5
        assert psi(3, 0.0) == 0.0
        assert abs(psi(3, 1.0)) < 1e-15

    @pytest.mark.parametrize("n", [0, -1, 1.5])
    def test_bad_mode(self, n):
        with pytest.raises(DomainError):
            psi(n, 0.3)

    def test_eigenmode(self):
        mode = EigenMode(3)
        assert mode.eigenvalue == 9
        assert mode(0.2) == psi(3, 0.2)


class TestLaplaceBeltrami:
    def test_mode1(self):
        f = lambda q: psi(1, q)
        assert laplace_beltrami(f, 0.37) == pytest.approx(-psi(1, 0.37), abs=1e-5)

    def test_mode3(self):
        f = lambda q: psi(3, q)
        assert laplace_beltrami(f, 0.5) == pytest.approx(-9 * psi(3, 0.5), abs=1e-4)

    @pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
    def test_constant_is_harmonic(self, q):
        assert abs(laplace_beltrami(lambda x: np.ones_like(x), q)) < 1e-6

    def test_matches_q_form(self):
        # independent route: sqrt(q(1-q)) d/dq [sqrt(q(1-q)) f'] for f = q^2,
        # which is (1 - 2q) q + 2 q (1 - q) = 3q - 4q^2... computed symbolically
        q = 0.3
        expected = 0.5 * (1 - 2 * q) * 2 * q + q * (1 - q) * 2
        assert laplace_beltrami(lambda x: x**2, q) == pytest.approx(expected, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            laplace_beltrami(lambda x: x, 1.0)

    def test_eigen_relation_grid(self):
        qs = np.linspace(0.02, 0.98, 50)
        for n in range(1, 11):
            lap = laplace_beltrami(lambda x, n=n: psi(n, x), qs)
            assert np.max(np.abs(lap + n * n * psi(n, qs))) < 1e-4


class TestOrthonormality:
    def test_gram_matrix(self):
        gram = np.array([
            [integrate_weighted(lambda q, n=n, m=m: psi(n, q) * psi(m, q)) for m in range(1, 21)]
            for n in range(1, 21)
        ])
        assert np.max(np.abs(gram - np.eye(20))) < 1e-10


class TestExpansion:
    def test_single_mode(self):
        e = expand(lambda q: psi(2, q), 6)
        assert e.coefficient(2) == pytest.approx(1.0, abs=1e-12)
        for n in (1, 3, 4, 5, 6):
            assert abs(e.coefficient(n)) < 1e-12

    def test_linear_combination(self):
        e = expand(lambda q: 3 * psi(1, q) + 0.5 * psi(4, q), 6)
        assert e.coefficient(1) == pytest.approx(3.0, abs=1e-12)
        assert e.coefficient(4) == pytest.approx(0.5, abs=1e-12)
        assert max(abs(e.coefficient(n)) for n in (2, 3, 5, 6)) < 1e-12

    def test_parabola_against_oracle(self):
        e = expand(lambda q: q * (1 - q), 8)
        for n in range(1, 9):
            oracle = theta_midpoint(
                lambda th: (np.sin(th / 2) ** 2 * np.cos(th / 2) ** 2) * SQRT_2_PI * np.sin(n * th)
            )
            assert e.coefficient(n) == pytest.approx(oracle, abs=1e-9)
            if n % 2 == 0:
                assert abs(e.coefficient(n)) < 1e-12

    @settings(max_examples=20, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8))
    def test_expand_evaluate_roundtrip(self, coeffs):
        e0 = SpectralExpansion(tuple(range(1, len(coeffs) + 1)), tuple(coeffs))
        e1 = expand(lambda q: evaluate(e0, q), len(coeffs))
        np.testing.assert_allclose(e1.coefficients, coeffs, atol=1e-10)

    def test_evaluate_examples(self):
        assert evaluate(SpectralExpansion((1,), (1.0,)), 0.5) == pytest.approx(psi(1, 0.5))
        assert evaluate(SpectralExpansion(), 0.3) == 0.0
        e = SpectralExpansion.from_pairs([(1, 2.0), (2, -1.0)])
        assert evaluate(e, 0.5) == pytest.approx(2 * SQRT_2_PI, rel=1e-14)

    @pytest.mark.parametrize("modes", [(0,), (2, 1), (1, 1)])
    def test_invalid_expansions(self, modes):
        with pytest.raises(DomainError):
            SpectralExpansion(modes, tuple(1.0 for _ in modes))


class TestEvolution:
    e = SpectralExpansion((1, 2, 5), (1.0, -0.5, 0.25))

    def test_heat_zero_time(self):
        assert heat_evolve(self.e, 0.0) == self.e

    def test_heat_consistent(self):
        out = heat_evolve(SpectralExpansion((1,), (1.0,)), 1.0)
        assert out.coefficients[0] == pytest.approx(math.exp(-1), rel=1e-15)

    def test_heat_paper(self):
        out = heat_evolve(SpectralExpansion((2,), (1.0,)), 0.5, "paper")
        assert out.coefficients[0] == pytest.approx(math.exp(-1), rel=1e-15)

    def test_heat_negative_time(self):
        with pytest.raises(DomainError):
            heat_evolve(self.e, -0.1)

    def test_heat_solves_pde(self):
        # u_t = Delta u checked with finite differences in t and q
        q, t, dt = 0.3, 0.2, 1e-5
        u = lambda s, x: evaluate(heat_evolve(self.e, s), x)
        u_t = (u(t + dt, q) - u(t - dt, q)) / (2 * dt)
        assert u_t == pytest.approx(laplace_beltrami(lambda x: u(t, x), q, 1e-3), abs=1e-4)

    @given(st.floats(1e-3, 10))
    def test_heat_contracts(self, t):
        assert heat_evolve(self.e, t).norm() < self.e.norm()

    def test_wave_examples(self):
        assert wave_evolve(self.e, 0.0).coefficients == tuple(complex(c) for c in self.e.coefficients)
        one = SpectralExpansion((1,), (1.0,))
        assert wave_evolve(one, 2 * math.pi).coefficients[0] == pytest.approx(1.0, abs=1e-15)
        two = SpectralExpansion((2,), (1.0,))
        assert wave_evolve(two, math.pi / 2).coefficients[0] == pytest.approx(-1.0, abs=1e-15)

    @given(st.floats(-100, 100))
    def test_wave_preserves_norm(self, t):
        assert wave_evolve(self.e, t).norm() == pytest.approx(self.e.norm(), abs=1e-14)

    def test_decay_law_enum(self):
        assert DecayLaw("paper") is DecayLaw.PAPER


class TestGreens:
    def test_diagonal_center_series(self):
        # (2/pi) sum over odd n of 1/n^2 = (2/pi)(pi^2/8)
        assert greens_series(0.5, 0.5, 1_000_000) == pytest.approx(math.pi / 4, abs=1e-6)

    def test_diagonal_center_closed(self):
        assert greens_closed(0.5, 0.5) == pytest.approx(math.pi / 4, rel=1e-15)

    def test_boundary(self):
        assert abs(greens_series(1e-14, 0.4, 1000)) < 1e-5
        assert abs(greens_closed(1e-14, 1 / 3)) < 1e-6

    def test_series_symmetry(self):
        assert greens_series(1 / 3, 2 / 3, 5000) == pytest.approx(greens_series(2 / 3, 1 / 3, 5000),
                                                                 rel=1e-13)

    def test_series_vs_closed_grid(self):
        g = np.linspace(0.02, 0.98, 30)
        Q, QP = np.meshgrid(g, g)
        diff = greens_series(Q, QP, 10_000) - greens_closed(Q, QP)
        assert np.max(np.abs(diff)) < 1e-3

    @pytest.mark.parametrize("qp", [1 / 3, 1 / 2, 2 / 3])
    @pytest.mark.parametrize("q", [0.1, 0.25, 0.8, 0.95])
    def test_closed_is_harmonic_off_diagonal(self, q, qp):
        lap = laplace_beltrami(lambda x: greens_closed(x, qp), q, 1e-3)
        assert abs(lap) < 1e-4

    def test_domain(self):
        with pytest.raises(DomainError):
            greens_closed(0.5, 1.0)

"""Quantized free particle and oscillators on the Bernoulli manifold.

With the momentum operator -i hbar sqrt(q(1-q)) d/dq the kinetic term is
-(hbar^2 / 2m) times the Laplace-Beltrami operator, which in the theta chart
is -(hbar^2 / 2m) d^2/d(theta)^2 on (0, pi) with Dirichlet ends. A potential
V(theta) turns the stationary problem into

    psi'' = (2m / hbar^2) (V(theta) - E) psi,   psi(0) = psi(pi) = 0.

For the quadratic potential (k/2)(q - 1/2)^2 this is a Mathieu equation and
the levels are the zeros in E of the odd Mathieu solution at theta = pi.
Both that route and a generic shooting solver are provided; they are
implemented independently so each can check the other.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .errors import DomainError, SearchError
from .manifold import check_probability
from .numerics import Bracket, find_root, solve_ivp
from .spectral import psi as _psi

log = logging.getLogger(__name__)

#: IVP tolerance for energy conditions and wavefunctions
SHOOT_TOL = 1e-11
#: abscissa tolerance for energy roots
ENERGY_TOL = 1e-10
#: looser tolerance when only the node count is needed
NODE_TOL = 1e-8


@dataclass(frozen=True)
class PhysicalParams:
    """Mass m (nerts), spring constant k (nerts/s^2), hbar and anchor q'.

    Defaults are the m = k = 8, hbar = 1, q' = 1/2 regime.
    """

    m: float = 8.0
    k: float = 8.0
    hbar: float = 1.0
    qprime: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m > 0):
            raise DomainError(f"mass must be positive, got {self.m}")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise DomainError(f"spring constant must be >= 0, got {self.k}")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise DomainError(f"hbar must be positive, got {self.hbar}")
        check_probability(self.qprime, "qprime")

    @property
    def kinetic_scale(self) -> float:
        """hbar^2 / 2m, the free level spacing unit."""
        return self.hbar**2 / (2.0 * self.m)


@dataclass(frozen=True)
class MathieuParams:
    """Characteristic pair of y'' + (a - 2 q_M cos 2 theta) y = 0."""

    a: float
    q_M: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.q_M)):
            raise DomainError(f"Mathieu parameters must be finite, got {self}")


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    E_exact: float
    E_approx: float | None = None
    method: Literal["root-found", "formula"] = "root-found"


@dataclass(frozen=True)
class EnergySpectrum:
    levels: tuple[EnergyLevel, ...] = field(default_factory=tuple)

    def __post_init__(self):
        levels = tuple(self.levels)
        es = [lv.E_exact for lv in levels]
        if any(b <= a for a, b in zip(es, es[1:])):
            raise DomainError(f"energy levels must be strictly increasing: {es}")
        if any(e <= 0 for e in es):
            raise DomainError(f"energy levels must be positive: {es}")
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.E_exact for lv in self.levels])

    def level(self, n: int) -> EnergyLevel:
        for lv in self.levels:
            if lv.n == n:
                return lv
        raise KeyError(n)


def _check_level(n):
    if int(n) != n or n < 1:
        raise DomainError(f"level index must be an integer >= 1, got {n!r}")


# ---------------------------------------------------------------------------
# free particle


def free_particle_energy(p: PhysicalParams, n: int) -> float:
    _check_level(n)
    return p.hbar**2 * n * n / (2.0 * p.m)


def free_particle_spectrum(p: PhysicalParams, n_max: int) -> EnergySpectrum:
    _check_level(n_max)
    return EnergySpectrum(tuple(
        EnergyLevel(n, free_particle_energy(p, n), free_particle_energy(p, n), "formula")
        for n in range(1, n_max + 1)
    ))


def free_particle_wavefunction(n: int) -> Callable:
    """The free-particle state n, identical to the Laplace-Beltrami mode Psi_n."""
    _check_level(n)
    return lambda q: _psi(n, q)


# ---------------------------------------------------------------------------
# shooting machinery


class _Shooter:
    """Integrates psi'' = -w(theta; E) psi from theta = 0 with psi(0)=0, psi'(0)=1."""

    def __init__(self, coefficient: Callable[[float], Callable[[float], float]]):
        self._coefficient = coefficient

    def _rhs(self, E):
        w = self._coefficient(E)

        def rhs(t, y):
            return np.array([y[1], -w(t) * y[0]])

        return rhs

    def end_value(self, E, tol=SHOOT_TOL) -> float:
        return float(solve_ivp(self._rhs(E), (0.0, 1.0), (0.0, math.pi), tol).y[0])

    def norm_squared(self, E, tol=SHOOT_TOL) -> float:
        """Integral of psi^2 over (0, pi), carried as an extra IVP state.

        In the theta chart the arcsine weight becomes d(theta), so this is the
        weighted squared norm of q -> psi(theta(q)).
        """
        w = self._coefficient(E)

        def rhs(t, y):
            return np.array([y[1], -w(t) * y[0], y[0] * y[0]])

        return float(solve_ivp(rhs, (0.0, 1.0, 0.0), (0.0, math.pi), tol).y[2])

    def profile(self, E, theta, tol=SHOOT_TOL, derivative=False) -> np.ndarray:
        """Solution values at the (any-order) points `theta` in [0, pi]."""
        theta = np.asarray(theta, dtype=float)
        flat = theta.ravel()
        if np.any(flat < 0) or np.any(flat > math.pi):
            raise DomainError("theta must lie in [0, pi]")
        order = np.argsort(flat, kind="stable")
        pts = flat[order]
        t_end = float(pts[-1]) if pts.size else 0.0
        out = np.empty(flat.size)
        if pts.size:
            sol = solve_ivp(self._rhs(E), (0.0, 1.0), (0.0, t_end), tol,
                            t_eval=pts) if t_end > 0 else None
            if sol is None:
                vals = np.zeros(pts.size) if not derivative else np.ones(pts.size)
            else:
                vals = sol.ys[:, 1 if derivative else 0]
            out[order] = vals
        return out.reshape(theta.shape)

    def nodes(self, E, tol=NODE_TOL) -> int:
        """Number of zeros of the solution in the open interval (0, pi)."""
        sol = solve_ivp(self._rhs(E), (0.0, 1.0), (0.0, math.pi), tol, dense=True)
        return count_sign_changes(sol.ys[1:, 0])

    def is_level(self, E, n, delta) -> bool:
        """True when the n-th eigenvalue lies within (E - delta, E + delta)."""
        return self.nodes(E - delta) == n - 1 and self.nodes(E + delta) == n

    def isolate(self, n, lo, hi, max_iter=200) -> Bracket:
        """Bracket containing exactly the n-th eigenvalue, by bisection on node count."""
        widen = max(hi - lo, 1.0)
        for _ in range(60):
            n_lo = self.nodes(lo)
            if n_lo <= n - 1:
                break
            lo -= widen
            widen *= 2
        else:
            raise SearchError(f"no lower energy bound for level {n}", seed=lo, n=n)
        widen = max(hi - lo, 1.0)
        for _ in range(60):
            n_hi = self.nodes(hi)
            if n_hi >= n:
                break
            hi += widen
            widen *= 2
        else:
            raise SearchError(f"no upper energy bound for level {n}", seed=hi, n=n)
        for _ in range(max_iter):
            if n_lo == n - 1 and n_hi == n:
                f_lo, f_hi = self.end_value(lo), self.end_value(hi)
                if f_lo * f_hi < 0:
                    return Bracket(lo, hi, f_lo, f_hi)
                # an end value rounding to the wrong sign sits on the root;
                # shrink towards the interior and retry
            mid = 0.5 * (lo + hi)
            n_mid = self.nodes(mid)
            if n_mid >= n:
                hi, n_hi = mid, n_mid
            else:
                lo, n_lo = mid, n_mid
        raise SearchError(f"could not isolate level {n} in [{lo}, {hi}]", n=n)


def count_sign_changes(values) -> int:
    """Sign changes in a sampled sequence, ignoring exact zeros."""
    v = np.asarray(values, dtype=float)
    v = v[v != 0.0]
    return int(np.count_nonzero(v[1:] * v[:-1] < 0))


class Wavefunction:
    """Dirichlet eigenfunction on (0, 1), normalized under the arcsine weight.

    Calling it with q (scalar or array in [0, 1]) integrates the underlying
    IVP once over the sorted chart points.
    """

    def __init__(self, shooter: _Shooter, energy: float, n: int):
        self.n = n
        self.energy = energy
        self._shooter = shooter
        self.scale = 1.0 / math.sqrt(shooter.norm_squared(energy))

    def on_theta(self, theta):
        return self.scale * self._shooter.profile(self.energy, theta)

    def __call__(self, q):
        arr = np.asarray(q, dtype=float)
        if np.any(arr < 0) or np.any(arr > 1):
            raise DomainError(f"q must lie in [0, 1], got {q!r}")
        out = self.on_theta(2.0 * np.arcsin(np.sqrt(arr)))
        return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quadratic-KL oscillator (Mathieu route)


def mathieu_params(p: PhysicalParams, E: float) -> MathieuParams:
    """Map (params, E) to the canonical Mathieu pair.

    a = (16 m E - k m) / (8 hbar^2) and q_M = k m / (16 hbar^2), so that
    2 q_M reproduces the cos(2 theta) coefficient k m / (8 hbar^2).
    """
    h2 = p.hbar**2
    return MathieuParams((16.0 * p.m * E - p.k * p.m) / (8.0 * h2), p.k * p.m / (16.0 * h2))


def _mathieu_shooter(mp_of_E: Callable[[float], MathieuParams]) -> _Shooter:
    def coefficient(E):
        mp = mp_of_E(E)
        a, two_q = mp.a, 2.0 * mp.q_M
        return lambda t: a - two_q * math.cos(2.0 * t)

    return _Shooter(coefficient)


def _mathieu_solution(mp: MathieuParams, theta, y0, tol):
    theta_arr = np.asarray(theta, dtype=float)
    flat = theta_arr.ravel()
    if np.any(flat < 0) or np.any(flat > math.pi) or not np.all(np.isfinite(flat)):
        raise DomainError(f"theta must lie in [0, pi], got {theta!r}")
    a, two_q = mp.a, 2.0 * mp.q_M

    def rhs(t, y):
        return np.array([y[1], -(a - two_q * math.cos(2.0 * t)) * y[0]])

    order = np.argsort(flat, kind="stable")
    pts = flat[order]
    out = np.empty(flat.size)
    if pts[-1] > 0:
        sol = solve_ivp(rhs, y0, (0.0, float(pts[-1])), tol, t_eval=pts)
        out[order] = sol.ys[:, 0]
    else:
        out[:] = y0[0]
    out = out.reshape(theta_arr.shape)
    return float(out) if out.ndim == 0 else out


def mathieu_S(mp: MathieuParams, theta, tol: float = SHOOT_TOL):
    """Odd Mathieu solution: y(0) = 0, y'(0) = 1."""
    return _mathieu_solution(mp, theta, (0.0, 1.0), tol)


def mathieu_C(mp: MathieuParams, theta, tol: float = SHOOT_TOL):
    """Even Mathieu solution: y(0) = 1, y'(0) = 0."""
    return _mathieu_solution(mp, theta, (1.0, 0.0), tol)


def _require_centered(p: PhysicalParams):
    if p.qprime != 0.5:
        raise DomainError(
            "the Mathieu reduction needs qprime = 1/2; use shooting_solve for other anchors"
        )


def oscillator_energy_condition(p: PhysicalParams, E: float, tol: float = SHOOT_TOL) -> float:
    """S(a(E), q_M, pi); its zeros in E are the oscillator energy levels."""
    _require_centered(p)
    return mathieu_S(mathieu_params(p, E), math.pi, tol)


def oscillator_levels_approx(p: PhysicalParams, n: int) -> float:
    """(k m + 8 n^2 hbar^2 + 16 n hbar^2 + 8 hbar^2) / (16 m)."""
    _check_level(n)
    h2 = p.hbar**2
    return (p.k * p.m + 8 * n * n * h2 + 16 * n * h2 + 8 * h2) / (16.0 * p.m)


def oscillator_levels_asymptotic(p: PhysicalParams, n: int) -> float:
    """Large-n law n^2 hbar^2 / (2m)."""
    return free_particle_energy(p, n)


def approx_condition(p: PhysicalParams, E: float) -> float:
    """cos(pi/4 (sqrt((32 E m - 2 k m) / hbar^2) - 2)), the small-q_M form of S(pi)."""
    radicand = (32.0 * E * p.m - 2.0 * p.k * p.m) / p.hbar**2
    if radicand < 0:
        raise DomainError(f"32 E m - 2 k m must be >= 0 (E={E})")
    return math.cos(0.25 * math.pi * (math.sqrt(radicand) - 2.0))


def _seed(p: PhysicalParams, n: int) -> float:
    # the approximate formula evaluated one index lower: its zeros count the
    # ground state as index 0, while levels here start at n = 1
    return p.k / 16.0 + free_particle_energy(p, n)


def _scan_for_sign_change(f, seed, step, lower, growth=1.25, max_expansions=80):
    """Walk outward from `seed` on both sides until f changes sign."""
    f_seed = f(seed)
    if f_seed == 0.0:
        return seed, seed, 0.0, 0.0
    last = {+1: (seed, f_seed), -1: (seed, f_seed)}
    offsets = {+1: 0.0, -1: 0.0}
    h = step
    for _ in range(max_expansions):
        for side in (-1, +1):
            x_prev, f_prev = last[side]
            if side < 0 and x_prev <= lower:
                continue
            offsets[side] += h
            x = seed + side * offsets[side]
            if side < 0 and x <= lower:
                x = lower
            fx = f(x)
            if fx == 0.0:
                return x, x, 0.0, 0.0
            if fx * f_prev < 0:
                return (x, x_prev, fx, f_prev) if side < 0 else (x_prev, x, f_prev, fx)
            last[side] = (x, fx)
        h *= growth
    raise SearchError(f"no sign change found around seed E={seed}", seed=seed)


def oscillator_levels(p: PhysicalParams, n_max: int) -> EnergySpectrum:
    """Exact levels 1..n_max of the quadratic-KL oscillator via the Mathieu condition.

    Each level is bracketed by scanning outward from a seed built from the
    approximate formula, refined with Brent's method, then audited: the
    eigenfunction of level n must have exactly n - 1 interior nodes. Levels
    failing the audit are re-bracketed by bisection on the node count.
    """
    _require_centered(p)
    _check_level(n_max)
    shooter = _mathieu_shooter(lambda E: mathieu_params(p, E))
    f = shooter.end_value
    c = p.kinetic_scale
    v_max = p.k / 8.0
    levels = []
    previous = 0.0
    for n in range(1, n_max + 1):
        seed = _seed(p, n)
        E = None
        try:
            lo, hi, f_lo, f_hi = _scan_for_sign_change(
                f, seed, step=0.05 * c * (2 * n + 1), lower=previous
            )
            if lo == hi:
                E = lo
            else:
                E = find_root(f, Bracket(lo, hi, f_lo, f_hi), ENERGY_TOL)
        except SearchError:
            log.debug("seed scan failed for level %d", n)
        if E is None or E <= previous or not shooter.is_level(E, n, 0.01 * c * (2 * n + 1)):
            log.debug("level %d failed the node audit (E=%s); re-bracketing", n, E)
            bracket = shooter.isolate(n, c * (n - 0.5) ** 2, v_max + c * (n + 0.5) ** 2)
            E = find_root(f, bracket, ENERGY_TOL)
        levels.append(EnergyLevel(n, E, oscillator_levels_approx(p, n), "root-found"))
        previous = E
    return EnergySpectrum(tuple(levels))


def oscillator_wavefunction(p: PhysicalParams, n: int, energy: float | None = None) -> Wavefunction:
    """Normalized q -> S(a(E_n), q_M, 2 arcsin sqrt q)."""
    _require_centered(p)
    _check_level(n)
    if energy is None:
        energy = oscillator_levels(p, n).level(n).E_exact
    return Wavefunction(_mathieu_shooter(lambda E: mathieu_params(p, E)), energy, n)


def pendulum_map_residuals(m: float, g: float, l: float, E: float, hbar: float = 1.0):
    """Coefficient mismatches between the Bernoulli and pendulum Mathieu forms.

    Sets k = 64 m g l^3 and compares, after the substitution eta = 2 theta,
    the cos term km/(8 hbar^2) vs 8 m^2 g l^3 / hbar^2 and the constant term
    (16 m E - k m)/(8 hbar^2) vs (8 m E l^2 - 8 m^2 g l^3) / hbar^2. Both
    vanish for every E exactly when l = 1/2.
    """
    for name, v in (("m", m), ("g", g), ("l", l), ("hbar", hbar)):
        if not v > 0:
            raise DomainError(f"{name} must be positive, got {v}")
    k = 64.0 * m * g * l**3
    h2 = hbar**2
    cos_residual = k * m / (8.0 * h2) - 8.0 * m * m * g * l**3 / h2
    const_residual = (16.0 * m * E - k * m) / (8.0 * h2) - (
        8.0 * m * E * l * l - 8.0 * m * m * g * l**3
    ) / h2
    return cos_residual, const_residual


# ---------------------------------------------------------------------------
# generic shooting solver


def kl_quadratic_potential(p: PhysicalParams) -> Callable[[float], float]:
    """(k/2)(sin^2(theta/2) - q')^2; equals (k/8) cos^2(theta) when q' = 1/2."""
    k, qp = p.k, p.qprime
    return lambda t: 0.5 * k * (math.sin(0.5 * t) ** 2 - qp) ** 2


def mathieu_potential(p: PhysicalParams) -> Callable[[float], float]:
    k = p.k
    return lambda t: 0.125 * k * math.cos(t) ** 2


def geodesic_potential(p: PhysicalParams) -> Callable[[float], float]:
    """(k/2) * (1/2) (theta - theta')^2 with theta' the chart image of q'."""
    k = p.k
    tp = 2.0 * math.asin(math.sqrt(p.qprime))
    return lambda t: 0.25 * k * (t - tp) ** 2


def harmonic_potential(K: float, center: float = math.pi / 2) -> Callable[[float], float]:
    return lambda t: 0.5 * K * (t - center) ** 2


def _potential_shooter(p: PhysicalParams, V: Callable[[float], float]) -> _Shooter:
    two_m = 2.0 * p.m / p.hbar**2

    def coefficient(E):
        return lambda t: two_m * (E - V(t))

    return _Shooter(coefficient)


def _potential_range(V, samples=4001):
    theta = np.linspace(0.0, math.pi, samples)[1:-1]
    vals = np.array([float(V(t)) for t in theta])
    if not np.all(np.isfinite(vals)):
        raise DomainError("potential must be finite on (0, pi)")
    return float(vals.min()), float(vals.max())


def shooting_solve(p: PhysicalParams, V: Callable[[float], float], n_max: int) -> EnergySpectrum:
    """Dirichlet levels of -(hbar^2/2m) psi'' + V(theta) psi = E psi on (0, pi).

    Each level is isolated by bisection on the node count of the IVP
    solution (Sturm oscillation), which cannot skip levels, then refined with
    Brent's method on psi(pi; E). Levels are bounded a priori by
    min V + n^2 hbar^2/2m <= E_n <= max V + n^2 hbar^2/2m.
    """
    _check_level(n_max)
    shooter = _potential_shooter(p, V)
    v_min, v_max = _potential_range(V)
    c = p.kinetic_scale
    levels = []
    for n in range(1, n_max + 1):
        bracket = shooter.isolate(n, v_min + c * (n - 0.5) ** 2, v_max + c * (n + 0.5) ** 2)
        E = find_root(shooter.end_value, bracket, ENERGY_TOL)
        levels.append(EnergyLevel(n, E, None, "root-found"))
    return EnergySpectrum(tuple(levels))


def shooting_wavefunction(p: PhysicalParams, V: Callable[[float], float], n: int,
                          energy: float | None = None) -> Wavefunction:
    _check_level(n)
    if energy is None:
        energy = shooting_solve(p, V, n).level(n).E_exact
    return Wavefunction(_potential_shooter(p, V), energy, n)

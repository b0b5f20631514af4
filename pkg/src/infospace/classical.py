"""Classical Hamiltonian motion on the Bernoulli manifold.

    H(q, p) = q (1 - q) p^2 / (2m) + U(q)

with U one of: nothing (free particle), (k/2) D_KL(q', q), (k/2) (q' - q)^2,
or (k/2) times half the squared geodesic distance. Hamilton's equations are
integrated directly in (q, p) with analytic forces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BoundaryEscapeError, DomainError
from .manifold import check_probability, geodesic_sqdist, kl_divergence, kl_quadratic
from .numerics import solve_ivp
from .quantum import PhysicalParams

#: trajectories halt this close to q = 0 or q = 1
BOUNDARY_GUARD = 1e-12
#: argument order of the KL potential: D_KL(q', q), anchor first
KL_ARGUMENT_ORDER = ("qprime", "q")
DEFAULT_TOL = 1e-12


class Potential(str, Enum):
    FREE = "free"
    KL = "kl"
    KL_QUADRATIC = "kl_quadratic"
    GEODESIC = "geodesic"


@dataclass(frozen=True)
class PhaseState:
    q: float
    p: float
    t: float = 0.0

    def __post_init__(self):
        check_probability(self.q)
        if not (math.isfinite(self.p) and math.isfinite(self.t)):
            raise DomainError(f"phase state must be finite, got {self}")


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[PhaseState, ...]
    potential_tag: Potential
    params: PhysicalParams

    def __post_init__(self):
        ts = [s.t for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("trajectory timestamps must be strictly increasing")

    def __len__(self):
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def q(self) -> np.ndarray:
        return np.array([s.q for s in self.samples])

    @property
    def p(self) -> np.ndarray:
        return np.array([s.p for s in self.samples])

    def energies(self) -> np.ndarray:
        return np.array([hamiltonian(s, self.params, self.potential_tag) for s in self.samples])

    @property
    def final(self) -> PhaseState:
        return self.samples[-1]


def potential_energy(q, params: PhysicalParams, potential_tag) -> float:
    tag = Potential(potential_tag)
    k, qp = params.k, params.qprime
    if tag is Potential.FREE:
        return 0.0 * q
    if tag is Potential.KL:
        return 0.5 * k * kl_divergence(qp, q)
    if tag is Potential.KL_QUADRATIC:
        return 0.5 * k * kl_quadratic(qp, q)
    return 0.5 * k * geodesic_sqdist(q, qp)


def potential_force(q: float, params: PhysicalParams, potential_tag) -> float:
    """-dU/dq for the tagged potential."""
    tag = Potential(potential_tag)
    k, qp = params.k, params.qprime
    if tag is Potential.FREE:
        return 0.0
    if tag is Potential.KL:
        return -0.5 * k * ((1.0 - qp) / (1.0 - q) - qp / q)
    if tag is Potential.KL_QUADRATIC:
        return k * (qp - q)
    dtheta = 2.0 * (math.asin(math.sqrt(q)) - math.asin(math.sqrt(qp)))
    return -0.5 * k * dtheta / math.sqrt(q * (1.0 - q))


def hamiltonian(s: PhaseState, params: PhysicalParams, potential_tag) -> float:
    q = check_probability(s.q)
    kinetic = q * (1.0 - q) * s.p**2 / (2.0 * params.m)
    return kinetic + potential_energy(q, params, potential_tag)


def hamilton_rhs(params: PhysicalParams, potential_tag):
    """Vector field (dq/dt, dp/dt) of Hamilton's equations.

    Returns NaN outside the open unit interval so the integrator rejects the
    step instead of evaluating logs or square roots of negative numbers.
    """
    tag = Potential(potential_tag)
    m = params.m

    def rhs(t, y):
        q, p = y
        if not 0.0 < q < 1.0:
            return np.array([math.nan, math.nan])
        qdot = q * (1.0 - q) * p / m
        pdot = -(1.0 - 2.0 * q) * p * p / (2.0 * m) + potential_force(q, params, tag)
        return np.array([qdot, pdot])

    return rhs


def integrate_trajectory(
    s0: PhaseState,
    params: PhysicalParams,
    potential_tag,
    t_end: float,
    tol: float = DEFAULT_TOL,
    n_samples: int = 1001,
) -> Trajectory:
    """Integrate from `s0` for a duration `t_end`, sampling `n_samples` uniform times.

    Raises BoundaryEscapeError, carrying the last valid state and the samples
    gathered so far, if q comes within BOUNDARY_GUARD of 0 or 1.
    """
    if not t_end > 0:
        raise DomainError(f"t_end must be positive, got {t_end}")
    if n_samples < 2:
        raise DomainError(f"need at least 2 samples, got {n_samples}")
    tag = Potential(potential_tag)
    times = np.linspace(s0.t, s0.t + t_end, n_samples)
    recorded = [PhaseState(s0.q, s0.p, s0.t)]
    cursor = 1
    last = recorded[0]

    def on_step(t, y):
        nonlocal cursor, last
        q, p, t = float(y[0]), float(y[1]), float(t)
        if not BOUNDARY_GUARD < q < 1.0 - BOUNDARY_GUARD:
            raise BoundaryEscapeError(
                f"trajectory reached the boundary at t={t:.6g} (q={q!r}); "
                f"last valid state q={last.q!r}, p={last.p!r}, t={last.t!r}",
                last_state=last,
                partial=Trajectory(tuple(recorded), tag, params),
            )
        last = PhaseState(q, p, t)
        while cursor < n_samples and times[cursor] == t:
            recorded.append(last)
            cursor += 1

    solve_ivp(
        hamilton_rhs(params, tag),
        (s0.q, s0.p),
        (s0.t, s0.t + t_end),
        tol,
        t_eval=times,
        step_callback=on_step,
    )
    return Trajectory(tuple(recorded), tag, params)


def theta_velocity(s: PhaseState, params: PhysicalParams) -> float:
    """d(theta)/dt = sqrt(q (1 - q)) p / m; constant along free motion."""
    return math.sqrt(s.q * (1.0 - s.q)) * s.p / params.m


def time_reversal_error(s0: PhaseState, params: PhysicalParams, potential_tag,
                        t_end: float, tol: float = DEFAULT_TOL) -> float:
    """Largest of |q_back - q0| and |p_back + p0| after a forward run, a momentum
    flip and a second forward run."""
    fwd = integrate_trajectory(s0, params, potential_tag, t_end, tol, n_samples=2).final
    back = integrate_trajectory(PhaseState(fwd.q, -fwd.p, 0.0), params, potential_tag,
                                t_end, tol, n_samples=2).final
    return max(abs(back.q - s0.q), abs(back.p + s0.p))

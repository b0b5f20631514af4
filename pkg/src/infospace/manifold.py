"""Geometry of the Bernoulli statistical manifold.

Points are Bernoulli parameters q in (0, 1). The Fisher metric is
g(q) = 1 / (q (1 - q)); the chart theta = 2 arcsin(sqrt(q)) in (0, pi) makes
it flat, g dq^2 = d(theta)^2. All functions accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: distance kept from 0 and 1 (and from 0 and pi in the theta chart)
BOUNDARY_GUARD = 1e-15


def _as_float(x):
    return float(x) if np.ndim(x) == 0 else x


def check_probability(q, name="q", guard=BOUNDARY_GUARD):
    """Return `q` as float/array, raising DomainError unless guard <= q <= 1 - guard."""
    arr = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < guard) or np.any(arr > 1.0 - guard):
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {q!r}")
    return _as_float(arr)


def check_angle(theta, name="theta", guard=BOUNDARY_GUARD):
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < guard) or np.any(arr > np.pi - guard):
        raise DomainError(f"{name} must lie in the open interval (0, pi), got {theta!r}")
    return _as_float(arr)


@dataclass(frozen=True)
class BernoulliPoint:
    q: float

    def __post_init__(self):
        object.__setattr__(self, "q", check_probability(float(self.q)))

    @property
    def theta(self) -> float:
        return to_theta(self.q)


@dataclass(frozen=True)
class ThetaPoint:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", check_angle(float(self.theta)))

    @property
    def q(self) -> float:
        return from_theta(self.theta)


def fisher_metric(q):
    """Fisher information of the Bernoulli family, 1 / (q (1 - q))."""
    q = check_probability(q)
    return 1.0 / (q * (1.0 - q))


def to_theta(q):
    """Chart map theta = 2 arcsin(sqrt(q))."""
    q = check_probability(q)
    return 2.0 * np.arcsin(np.sqrt(q))


def from_theta(theta):
    """Inverse chart map q = sin^2(theta / 2)."""
    theta = check_angle(theta)
    return np.sin(0.5 * theta) ** 2


def kl_divergence(a, b):
    """KL divergence D(a || b) between Bernoulli(a) and Bernoulli(b), in nats."""
    a = check_probability(a, "a")
    b = check_probability(b, "b")
    return a * np.log(a / b) + (1.0 - a) * np.log((1.0 - a) / (1.0 - b))


def kl_quadratic(qprime, q):
    """Quadratic stand-in for the KL potential: (qprime - q)^2.

    This is the working potential of the quadratic oscillator. It is *not* the
    Taylor expansion of :func:`kl_divergence`, which carries an extra factor
    1 / (2 qprime (1 - qprime)).
    """
    qprime = check_probability(qprime, "qprime")
    q = check_probability(q)
    return (qprime - q) ** 2


def geodesic_sqdist(q1, q2):
    """Half the squared Fisher-Rao distance, 0.5 * (theta1 - theta2)^2."""
    return 0.5 * (to_theta(q1) - to_theta(q2)) ** 2

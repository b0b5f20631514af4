"""Laplace-Beltrami eigenbasis on the Bernoulli manifold.

The Dirichlet eigenfunctions are Psi_n(q) = sqrt(2/pi) sin(2 n arcsin sqrt(q))
with eigenvalue -n^2 and are orthonormal under the arcsine weight
1 / sqrt(q (1 - q)). Expansions in this basis give the heat and wave
propagators, and the Green's function is available both as a series and in
closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

import numpy as np

from .errors import DomainError
from .manifold import _as_float, check_probability, from_theta, to_theta
from .numerics import finite_diff_second, integrate_weighted

NORM = math.sqrt(2.0 / math.pi)
DEFAULT_GREENS_TERMS = 10_000


class DecayLaw(str, Enum):
    CONSISTENT = "consistent"  # exp(-n^2 t), forced by the eigenvalues
    PAPER = "paper"  # exp(-n t), linear in the mode index


@dataclass(frozen=True)
class EigenMode:
    n: int

    def __post_init__(self):
        _check_mode(self.n)

    @property
    def eigenvalue(self) -> int:
        return self.n * self.n

    def __call__(self, q):
        return psi(self.n, q)


@dataclass(frozen=True)
class SpectralExpansion:
    """Finite expansion sum_n A_n Psi_n.

    ``modes`` and ``coefficients`` are parallel tuples; mode indices are
    strictly increasing and >= 1. ``n_max`` records the truncation order.
    Coefficients may be complex (wave evolution).
    """

    modes: tuple[int, ...] = ()
    coefficients: tuple[complex | float, ...] = ()
    n_max: int | None = None

    def __post_init__(self):
        modes = tuple(int(n) for n in self.modes)
        coeffs = tuple(self.coefficients)
        if len(modes) != len(coeffs):
            raise DomainError("modes and coefficients must have equal length")
        if modes and modes[0] < 1:
            raise DomainError("mode indices must be >= 1")
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise DomainError("mode indices must be strictly increasing")
        n_max = self.n_max if self.n_max is not None else (modes[-1] if modes else 0)
        if modes and n_max < modes[-1]:
            raise DomainError(f"n_max={n_max} is below the largest stored mode {modes[-1]}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "n_max", n_max)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, complex | float]], n_max=None):
        pairs = sorted(pairs)
        return cls(tuple(n for n, _ in pairs), tuple(c for _, c in pairs), n_max)

    def pairs(self) -> list[tuple[int, complex | float]]:
        return list(zip(self.modes, self.coefficients))

    def coefficient(self, n: int):
        try:
            return self.coefficients[self.modes.index(n)]
        except ValueError:
            return 0.0

    def norm(self) -> float:
        """Coefficient 2-norm (equal to the weighted L2 norm of the field)."""
        return math.sqrt(math.fsum(abs(c) ** 2 for c in self.coefficients))

    def __len__(self):
        return len(self.modes)

    def __call__(self, q):
        return evaluate(self, q)


def _check_mode(n):
    if int(n) != n or n < 1:
        raise DomainError(f"mode index must be an integer >= 1, got {n!r}")


def psi(n: int, q):
    """Orthonormal eigenfunction Psi_n. Defined on the closed interval [0, 1]."""
    _check_mode(n)
    arr = np.asarray(q, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"q must lie in [0, 1], got {q!r}")
    return _as_float(NORM * np.sin(2.0 * n * np.arcsin(np.sqrt(arr))))


def laplace_beltrami(f: Callable, q, h: float = 1e-4):
    """Apply sqrt(q(1-q)) d/dq [sqrt(q(1-q)) df/dq] to `f` at `q`.

    In the theta chart the operator is d^2/d(theta)^2, so this is the central
    second difference of theta -> f(sin^2(theta/2)) with step `h` in theta.
    """
    theta = to_theta(q)
    if np.any(np.asarray(theta) - h <= 0.0) or np.any(np.asarray(theta) + h >= math.pi):
        raise DomainError(f"stencil of width h={h} leaves the chart at q={q!r}")
    return finite_diff_second(lambda t: f(from_theta(t)), theta, h)


def expand(f: Callable, n_max: int, tol: float = 1e-12) -> SpectralExpansion:
    """Generalized Fourier coefficients A_n = <f, Psi_n>_w for n = 1..n_max."""
    _check_mode(n_max)
    coeffs = []
    for n in range(1, n_max + 1):
        coeffs.append(integrate_weighted(lambda q, n=n: f(q) * psi(n, q), tol))
    return SpectralExpansion(tuple(range(1, n_max + 1)), tuple(coeffs), n_max)


def evaluate(e: SpectralExpansion, q):
    """Sum of A_n Psi_n(q) over the stored modes."""
    arr = np.asarray(q, dtype=float)
    total = np.zeros(arr.shape, dtype=complex if _is_complex(e) else float)
    for n, c in e.pairs():
        total = total + c * psi(n, arr)
    return _as_float(total) if total.ndim == 0 else total


def _is_complex(e):
    return any(isinstance(c, complex) or np.iscomplexobj(c) for c in e.coefficients)


def heat_evolve(e0: SpectralExpansion, t: float, decay_law=DecayLaw.CONSISTENT):
    """Propagate an expansion under the heat equation for time `t`.

    ``decay_law="consistent"`` damps mode n by exp(-n^2 t); ``"paper"``
    applies the linear-in-n factor exp(-n t) instead.
    """
    if not t >= 0:
        raise DomainError(f"heat evolution needs t >= 0, got {t}")
    law = DecayLaw(decay_law)
    if law is DecayLaw.CONSISTENT:
        factors = [math.exp(-n * n * t) for n in e0.modes]
    else:
        factors = [math.exp(-n * t) for n in e0.modes]
    return SpectralExpansion(
        e0.modes, tuple(c * f for c, f in zip(e0.coefficients, factors)), e0.n_max
    )


def wave_evolve(e0: SpectralExpansion, t: float) -> SpectralExpansion:
    """Multiply coefficient n by exp(-i n t)."""
    return SpectralExpansion(
        e0.modes,
        tuple(complex(c) * complex(math.cos(n * t), -math.sin(n * t))
              for n, c in zip(e0.modes, e0.coefficients)),
        e0.n_max,
    )


def greens_series(q, qprime, N: int = DEFAULT_GREENS_TERMS):
    """Partial sum of Psi_n(q) Psi_n(q') / n^2 for n = 1..N.

    Broadcasts over array inputs. The truncation error is bounded by
    2 / (pi N).
    """
    _check_mode(N)
    q = check_probability(q)
    qprime = check_probability(qprime, "qprime")
    th, thp = np.broadcast_arrays(to_theta(q), to_theta(qprime))
    flat_th, flat_thp = th.ravel(), thp.ravel()
    out = np.empty(flat_th.size)
    chunk = max(1, 2_000_000 // N)
    n = np.arange(1, N + 1, dtype=float)
    # sum smallest terms first
    n_rev, w_rev = n[::-1], (1.0 / n**2)[::-1]
    for start in range(0, flat_th.size, chunk):
        a = flat_th[start:start + chunk, None]
        b = flat_thp[start:start + chunk, None]
        terms = np.sin(n_rev * a) * np.sin(n_rev * b) * w_rev
        out[start:start + chunk] = terms.sum(axis=1)
    out *= 2.0 / math.pi
    return _as_float(out.reshape(th.shape))


def greens_closed(q, qprime):
    """Closed form of the Green's function series.

    (4/pi) arccos(sqrt q') arcsin(sqrt q)
        + 2 (arcsin sqrt q' - arcsin sqrt q) H(arcsin sqrt q - arcsin sqrt q'),
    with the Heaviside convention H(0) = 0.
    """
    q = check_probability(q)
    qprime = check_probability(qprime, "qprime")
    s = np.arcsin(np.sqrt(q))
    sp = np.arcsin(np.sqrt(qprime))
    step = np.where(s - sp > 0, 1.0, 0.0)
    value = 4.0 * np.arccos(np.sqrt(qprime)) * s / math.pi + 2.0 * (sp - s) * step
    return _as_float(value)

"""Domain-free numerical kernels.

Quadrature with the arcsine weight, an embedded Runge-Kutta integrator,
bracketed root finding and a central second difference. Every routine is a
pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BracketError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    EvaluationError,
    StiffnessError,
)

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample points inside the open interval (lo, hi)."""

    points: np.ndarray
    lo: float
    hi: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise DomainError("grid must be a nonempty 1-D sequence")
        if not self.lo < self.hi:
            raise DomainError(f"grid bounds out of order: lo={self.lo}, hi={self.hi}")
        if np.any(np.diff(pts) <= 0):
            raise DomainError("grid points must be strictly increasing")
        if pts[0] <= self.lo or pts[-1] >= self.hi:
            raise DomainError("grid points must lie strictly inside (lo, hi)")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.size

    @classmethod
    def interior(cls, lo: float, hi: float, resolution: int, eps: float = 1e-9) -> "Grid":
        """Uniform grid from lo + eps to hi - eps with `resolution` points."""
        if resolution < 2:
            raise DomainError(f"resolution must be >= 2, got {resolution}")
        return cls(np.linspace(lo + eps, hi - eps, resolution), lo, hi)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket endpoints out of order: [{self.lo}, {self.hi}]")
        if not self.f_lo * self.f_hi < 0:
            raise BracketError(
                f"no sign change on [{self.lo}, {self.hi}]: "
                f"f(lo)={self.f_lo!r}, f(hi)={self.f_hi!r}"
            )

    @classmethod
    def from_function(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, float(f(lo)), float(f(hi)))

    @property
    def width(self) -> float:
        return self.hi - self.lo


# ---------------------------------------------------------------------------
# quadrature


@lru_cache(maxsize=None)
def _theta_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    theta = 0.5 * math.pi * (x + 1.0)
    return theta, 0.5 * math.pi * w


def _sample(f: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        y = np.array([float(f(xi)) for xi in x])
    bad = ~np.isfinite(y)
    if bad.any():
        xb = float(x[np.argmax(bad)])
        raise EvaluationError(f"integrand is not finite at q={xb!r}", point=xb)
    return y


def integrate_weighted(
    f: Callable,
    tol: float = 1e-12,
    *,
    min_nodes: int = 32,
    max_nodes: int = 8192,
) -> float:
    """Integrate ``f(q) / sqrt(q (1 - q))`` over (0, 1).

    The substitution q = sin^2(theta / 2) turns the weight into d(theta), so the
    integral is computed as a Gauss-Legendre rule on theta in (0, pi) with no
    endpoint singularity. The node count doubles until two successive
    estimates agree to `tol`.

    `f` may be vectorized over numpy arrays; scalar-only callables are also
    accepted.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    n = min_nodes
    previous = None
    while n <= max_nodes:
        theta, w = _theta_rule(n)
        q = np.sin(0.5 * theta) ** 2
        estimate = float(np.dot(w, _sample(f, q)))
        if previous is not None and abs(estimate - previous) <= tol:
            return estimate
        previous = estimate
        n *= 2
    raise ConvergenceError(
        f"weighted quadrature did not reach tol={tol} with {max_nodes} nodes "
        f"(last estimate {previous!r})"
    )


# ---------------------------------------------------------------------------
# ODE integration (Dormand-Prince 5(4))

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# fifth-order weights minus embedded fourth-order weights
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_A_ROWS = [np.array(row) for row in _A]
_E_ROW = np.array(_E)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class IvpSolution:
    """Result of :func:`solve_ivp`.

    ``y`` is the state at the end of the span. ``t`` and ``ys`` hold the
    recorded samples: the requested ``t_eval`` points, or every accepted step
    when ``dense=True``.
    """

    y: np.ndarray
    t: np.ndarray = field(default_factory=lambda: np.empty(0))
    ys: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    nfev: int = 0
    nsteps: int = 0


def _initial_step(rhs, t0, y0, f0, direction, tol, span):
    scale = tol + tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(t0 + direction * h0, y1), dtype=float)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def solve_ivp(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_span: tuple[float, float],
    tol: float = 1e-10,
    *,
    t_eval: Sequence[float] | None = None,
    dense: bool = False,
    max_steps: int = 1_000_000,
    step_callback: Callable[[float, np.ndarray], None] | None = None,
) -> IvpSolution:
    """Integrate ``y' = rhs(t, y)`` over `t_span` with local error control.

    Absolute and relative tolerances are both `tol`. Steps are shortened so
    that every point in `t_eval` is hit exactly (no interpolation). When
    `step_callback` is given it is called with each accepted (t, y) and may
    raise to abort the integration.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=float, ndmin=1)
    if t1 == t0:
        return IvpSolution(y=y.copy(), t=np.array([t0]), ys=y[None, :].copy())
    direction = 1.0 if t1 > t0 else -1.0

    if t_eval is not None:
        targets = np.asarray(t_eval, dtype=float)
        if np.any(direction * np.diff(targets) < 0):
            raise DomainError("t_eval must be ordered along the integration direction")
        lo, hi = min(t0, t1), max(t0, t1)
        if targets.size and (targets.min() < lo or targets.max() > hi):
            raise DomainError("t_eval points must lie inside t_span")
    else:
        targets = np.empty(0)

    rec_t: list[float] = []
    rec_y: list[np.ndarray] = []
    i_eval = 0
    while i_eval < targets.size and targets[i_eval] == t0:
        rec_t.append(t0)
        rec_y.append(y.copy())
        i_eval += 1
    if dense:
        rec_t.append(t0)
        rec_y.append(y.copy())

    t = t0
    f = np.asarray(rhs(t, y), dtype=float)
    nfev = 1
    if not np.all(np.isfinite(f)):
        raise DivergenceError(f"right-hand side is not finite at t={t0}")
    h = _initial_step(rhs, t0, y, f, direction, tol, abs(t1 - t0))
    nfev += 1
    nsteps = 0
    K = np.empty((7, y.size))
    K[0] = f
    nonfinite = False

    while direction * (t1 - t) > 0:
        if nsteps >= max_steps:
            raise ConvergenceError(f"exceeded {max_steps} steps at t={t}")
        stop = targets[i_eval] if i_eval < targets.size else t1
        h_try = min(h, abs(stop - t))
        hit_stop = h_try == abs(stop - t)
        min_h = 16 * EPS * max(abs(t), 1.0)
        if h_try < min_h and not hit_stop:
            if nonfinite:
                raise DivergenceError(f"state became non-finite near t={t}")
            raise StiffnessError(f"step size underflow at t={t} (h={h_try:.3e})")

        dt = direction * h_try
        for s in range(1, 7):
            K[s] = rhs(t + _C[s] * dt, y + dt * (_A_ROWS[s] @ K[:s]))
        nfev += 6
        y_new = y + dt * (_A_ROWS[6] @ K[:6])
        err_vec = dt * (_E_ROW @ K)
        scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.dot(err_vec / scale, err_vec / scale)) / y.size)
        nonfinite = not math.isfinite(err) or not np.all(np.isfinite(y_new))
        if nonfinite:
            h = h_try * _MIN_FACTOR
            continue

        if err <= 1.0:
            t = stop if hit_stop else t + dt
            y = y_new
            K[0] = K[6]
            nsteps += 1
            if step_callback is not None:
                step_callback(t, y)
            if hit_stop and i_eval < targets.size:
                while i_eval < targets.size and targets[i_eval] == t:
                    rec_t.append(t)
                    rec_y.append(y.copy())
                    i_eval += 1
            if dense:
                rec_t.append(t)
                rec_y.append(y.copy())
            factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, _SAFETY * err**-0.2)
            # a shortened landing step says nothing about the natural step size
            h = max(h, h_try * factor) if hit_stop else h_try * factor
        else:
            h = h_try * max(_MIN_FACTOR, _SAFETY * err**-0.2)

    ys = np.array(rec_y) if rec_y else np.empty((0, y.size))
    return IvpSolution(y=y, t=np.array(rec_t), ys=ys, nfev=nfev, nsteps=nsteps)


# ---------------------------------------------------------------------------
# root finding


@dataclass(frozen=True)
class RootResult:
    root: float
    lo: float
    hi: float
    iterations: int
    nfev: int


def bracket_root(
    f: Callable[[float], float],
    bracket: Bracket | tuple[float, float],
    tol: float = 1e-12,
    maxiter: int = 200,
) -> RootResult:
    """Brent's method. The returned interval [lo, hi] always straddles the root.

    Interpolated steps are only accepted when they land inside the current
    bracket; otherwise the step is a bisection, so convergence is guaranteed.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if not isinstance(bracket, Bracket):
        bracket = Bracket.from_function(f, *bracket)
    nfev = 0

    def call(x):
        nonlocal nfev
        nfev += 1
        v = float(f(x))
        if not math.isfinite(v):
            raise EvaluationError(f"f is not finite at x={x!r}", point=x)
        return v

    a, b = bracket.lo, bracket.hi
    fa, fb = bracket.f_lo, bracket.f_hi
    c, fc = a, fa
    d = e = b - a
    for it in range(maxiter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2 * EPS * abs(b) + 0.5 * tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            lo, hi = (b, c) if b < c else (c, b)
            if fb == 0.0:
                lo = hi = b
            return RootResult(b, lo, hi, it, nfev)
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2 * m * s
                q = 1 - s
            else:
                qq = fa / fc
                r = fb / fc
                p = s * (2 * m * qq * (qq - r) - (b - a) * (r - 1))
                q = (qq - 1) * (r - 1) * (s - 1)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2 * p < min(3 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = call(b)
    raise ConvergenceError(f"root finding did not converge in {maxiter} iterations")


def find_root(
    f: Callable[[float], float],
    bracket: Bracket | tuple[float, float],
    tol: float = 1e-12,
) -> float:
    """Root of `f` inside `bracket`, located to an interval of width <= tol."""
    return bracket_root(f, bracket, tol).root


# ---------------------------------------------------------------------------
# finite differences


def finite_diff_second(f: Callable, x, h: float = 1e-4):
    """Central second difference ``(f(x-h) - 2 f(x) + f(x+h)) / h**2``."""
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    xa = np.asarray(x, dtype=float)
    fm, f0, fp = (np.asarray(f(xa + s), dtype=float) for s in (-h, 0.0, h))
    out = (fm - 2.0 * f0 + fp) / (h * h)
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"non-finite second difference near x={x!r}", point=x)
    return float(out) if out.ndim == 0 else out

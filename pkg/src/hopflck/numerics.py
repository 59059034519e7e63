"""Scalar numerical kernels: monotone root solving, rational recognition,
the potential ODE integrator and frame-flow finite differences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import BlowUp, DegenerateEquation

Rational = Fraction


@dataclass(frozen=True)
class ToleranceConfig:
    root_tol: float = 1e-12
    derivative_step: float = 1e-4
    residual_tol: float = 1e-6
    rational_tol: float = 1e-9
    max_denominator: int = 10**6

    def __post_init__(self):
        for name in ("root_tol", "derivative_step", "residual_tol", "rational_tol", "max_denominator"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    def as_dict(self) -> dict:
        return {
            "root_tol": self.root_tol,
            "derivative_step": self.derivative_step,
            "residual_tol": self.residual_tol,
            "rational_tol": self.rational_tol,
            "max_denominator": self.max_denominator,
        }


DEFAULT_TOLERANCES = ToleranceConfig()


# ---------------------------------------------------------------------------
# monotone root solving


def _log_lhs(y: float, la: float, a_exp: float, lb: float, b_exp: float) -> float:
    # log(a e^{A y} + b e^{B y}); la/lb are log a / log b (or -inf)
    return float(np.logaddexp(la + a_exp * y, lb + b_exp * y))


def solve_monotone(a: float, b: float, A: float, B: float, root_tol: float = 1e-12) -> float:
    """Return the unique x > 0 with a*x**A + b*x**B == 1.

    The left side is strictly increasing on x > 0 for nonnegative a, b and
    positive exponents.  The root is bracketed by doubling/halving from
    x = 1, narrowed by bisection in log x and polished by Newton steps on
    log(a x^A + b x^B).
    """
    if a < 0 or b < 0 or A <= 0 or B <= 0:
        raise ValueError("solve_monotone needs a, b >= 0 and A, B > 0")
    if a == 0 and b == 0:
        raise DegenerateEquation("a = b = 0: the equation has no solution")

    la = math.log(a) if a > 0 else -math.inf
    lb = math.log(b) if b > 0 else -math.inf

    def g(y):
        return _log_lhs(y, la, A, lb, B)

    step = math.log(2.0)
    lo = hi = 0.0
    if g(0.0) < 0:
        while g(hi) < 0:
            lo = hi
            hi += step
            step *= 2.0
    else:
        while g(lo) > 0:
            hi = lo
            lo -= step
            step *= 2.0

    for _ in range(200):
        if hi - lo <= 1e-3 * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid

    # safeguarded Newton on g(y) = log(a e^{Ay} + b e^{By}), slope = weighted mean of A, B
    y = 0.5 * (lo + hi)
    for _ in range(100):
        val = g(y)
        if val == 0.0:
            break
        if val < 0:
            lo = y
        else:
            hi = y
        wa = math.exp(la + A * y - val) if a > 0 else 0.0
        wb = math.exp(lb + B * y - val) if b > 0 else 0.0
        y_new = y - val / (A * wa + B * wb)
        if not lo <= y_new <= hi:
            y_new = 0.5 * (lo + hi)
        if abs(y_new - y) <= 4 * math.ulp(max(1.0, abs(y))) or y_new in (lo, hi) and hi - lo <= 4 * math.ulp(max(1.0, abs(y))):
            y = y_new
            break
        y = y_new
    return math.exp(y)


# ---------------------------------------------------------------------------
# rational recognition


def continued_fraction_convergents(x: float, max_terms: int = 64):
    """Yield successive continued-fraction convergents of x as Fractions."""
    h_prev, h = 1, math.floor(x)
    k_prev, k = 0, 1
    yield Fraction(h, k)
    frac = x - math.floor(x)
    for _ in range(max_terms):
        if frac < 1e-300:
            return
        inv = 1.0 / frac
        a = math.floor(inv)
        frac = inv - a
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield Fraction(h, k)


def recognize_rational(
    x: float, tol: float = 1e-9, max_denominator: int = 10**6
) -> Optional[Fraction]:
    """First continued-fraction convergent p/q of x with q <= max_denominator
    and |x - p/q| <= tol, or None.

    A None result only says no small-denominator rational lies within tol;
    it never certifies irrationality.
    """
    if not math.isfinite(x):
        raise ValueError("recognize_rational needs a finite number")
    for conv in continued_fraction_convergents(x):
        if conv.denominator > max_denominator:
            return None
        if abs(x - conv.numerator / conv.denominator) <= tol:
            return conv
    return None


# ---------------------------------------------------------------------------
# potential ODE  L'' = h L' - (L')^2


@dataclass
class PotentialTrajectory:
    theta: np.ndarray
    L: np.ndarray
    dL: np.ndarray
    d2L: np.ndarray
    residual: np.ndarray
    h: np.ndarray
    blown_up: bool = False
    message: str = ""

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual)) if self.residual.size else 0.0


def _h_and_derivative(h) -> tuple[Callable[[float], float], Callable[[float], float]]:
    if hasattr(h, "derivative"):
        return h, h.derivative

    def dh(t, eps=1e-5):
        return (h(t + eps) - h(t - eps)) / (2 * eps)

    return h, dh


def _rk4_step(rhs, t, y, dt):
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate_segment(rhs, t0, y0, t1, tol, dt_init, in_range):
    """Adaptive RK4 from t0 to t1 using step doubling as the error estimate."""
    t, y = t0, y0
    direction = 1.0 if t1 >= t0 else -1.0
    dt = direction * min(abs(dt_init), abs(t1 - t0)) if t1 != t0 else 0.0
    while direction * (t1 - t) > 1e-15 * max(1.0, abs(t1)):
        if direction * (t + dt - t1) > 0:
            dt = t1 - t
        full = _rk4_step(rhs, t, y, dt)
        half = _rk4_step(rhs, t, y, 0.5 * dt)
        two_half = _rk4_step(rhs, t + 0.5 * dt, half, 0.5 * dt)
        err = np.max(np.abs(two_half - full)) / 15.0
        scale = tol * (1.0 + np.max(np.abs(two_half)))
        if err <= scale or abs(dt) < 1e-12:
            y = two_half + (two_half - full) / 15.0
            t = t + dt
            if not in_range(y):
                return t, y, dt, False
            factor = 2.0 if err < scale / 32.0 else 1.0
            dt *= factor
        else:
            dt *= 0.5
    return t, y, dt, True


def integrate_potential(
    h,
    theta0: float,
    v0: float,
    span: tuple[float, float],
    config: ToleranceConfig = DEFAULT_TOLERANCES,
    samples: int = 257,
    floor: float = 1e-8,
    step_tol: float = 1e-12,
) -> PotentialTrajectory:
    """Integrate L'' = h L' - L'^2 with L(theta0) = 0, L'(theta0) = v0.

    L'' is carried as a third state variable (its derivative follows from
    differentiating the equation), so the reported residual
    |(L'^2 + L'')/L' - h| measures genuine integration drift.

    Raises BlowUp (carrying the partial trajectory) when L' leaves
    (floor, 1/floor).
    """
    lo, hi = float(span[0]), float(span[1])
    if not lo <= theta0 <= hi:
        raise ValueError("theta0 must lie inside the span")
    hv, dh = _h_and_derivative(h)
    grid = np.linspace(lo, hi, samples)
    if hv(theta0) <= 0:
        raise ValueError("h must be positive")

    def rhs(t, y):
        L, d1, d2 = y
        return np.array([d1, d2, dh(t) * d1 + hv(t) * d2 - 2.0 * d1 * d2])

    def in_range(y):
        return floor < y[1] < 1.0 / floor

    y0 = np.array([0.0, v0, hv(theta0) * v0 - v0 * v0])
    states: dict[int, np.ndarray] = {}
    blown = not in_range(y0)
    blown_at = theta0 if blown else None
    message = f"L' = {v0!r} outside ({floor!r}, {1.0 / floor!r}) at theta0" if blown else ""

    if not blown:
        for direction_grid in (np.where(grid >= theta0)[0], np.where(grid < theta0)[0][::-1]):
            t, y, dt = theta0, y0.copy(), 1e-2
            for idx in direction_grid:
                t, y, dt, ok = _integrate_segment(rhs, t, y, grid[idx], step_tol, dt, in_range)
                if not ok:
                    blown = True
                    blown_at = t
                    message = f"L' left ({floor!r}, {1.0 / floor!r}) near theta = {t:.6g}"
                    break
                states[int(idx)] = y
                if dt == 0.0:
                    dt = 1e-2 * (1 if grid[idx] >= theta0 else -1)

    keep = sorted(states)
    theta = grid[keep]
    arr = np.array([states[i] for i in keep]).reshape(-1, 3)
    hs = np.array([hv(t) for t in theta])
    resid = np.abs((arr[:, 1] ** 2 + arr[:, 2]) / arr[:, 1] - hs) if arr.size else np.zeros(0)
    traj = PotentialTrajectory(theta, arr[:, 0], arr[:, 1], arr[:, 2], resid, hs, blown, message)
    if blown:
        raise BlowUp(message, traj, blown_at)
    return traj


# ---------------------------------------------------------------------------
# finite differences along exact frame flows

_STENCILS = {
    2: ((1, 0.5), (-1, -0.5)),
    4: ((2, -1.0 / 12), (1, 8.0 / 12), (-1, -8.0 / 12), (-2, 1.0 / 12)),
}


def directional_derivative(f, frame_index: int, p, step: float = 1e-4, stencil: int = 2) -> float:
    """Derivative of f at p along the frame field e_{frame_index}.

    Uses the exact frame flow, so every evaluation point lies on S^1 x S^3.
    stencil=2 is the plain central difference, stencil=4 the five-point rule.
    """
    from .frame import frame_flow

    total = 0.0
    for offset, weight in _STENCILS[stencil]:
        total = total + weight * f(frame_flow(p, frame_index, offset * step))
    return total / step

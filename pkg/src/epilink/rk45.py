"""Embedded Dormand-Prince 5(4) integrator with proportional step control.

Seven stages with the first-same-as-last property; the 5th-order solution is
propagated and the difference to the embedded 4th-order solution drives the
step size.  Accepted points are recorded as-is (no dense output); callers
interpolate between them if they need a uniform grid.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = ["IntegrationError", "solve"]

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b - b_hat: weights of the 4th-order error estimate
_E = np.array([
    71 / 57600, 0.0, -71 / 16695, 71 / 1920,
    -17253 / 339200, 22 / 525, -1 / 40,
])

_SAFETY = 0.8
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ORDER = 5


class IntegrationError(RuntimeError):
    """Raised when the step size underflows before reaching the end time."""


def _error_norm(delta: np.ndarray, scale: np.ndarray) -> float:
    return float(np.sqrt(np.mean((delta / scale) ** 2)))


def _initial_step(f, t0, y0, f0, rel_tol, abs_tol, t_span):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = _error_norm(y0, scale)
    d1 = _error_norm(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = _error_norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    return min(100 * h0, h1, t_span)


def solve(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t_end: float,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    stop_condition: Callable[[float, np.ndarray], bool] | None = None,
    max_step: float = np.inf,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    A step is accepted when the RMS of the embedded error estimate, scaled
    by ``abs_tol + rel_tol * max(|y|, |y_new|)`` per component, is at most 1.
    Returns the accepted times and states, including the initial point.
    Integration also ends as soon as ``stop_condition(t, y)`` is true at an
    accepted point.

    Raises :class:`IntegrationError` if the controller drives the step size
    below the resolution of the time variable.
    """
    if t_end <= t0:
        raise ValueError("t_end must exceed t0")
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")

    y = np.asarray(y0, dtype=float).copy()
    t = float(t0)
    k = np.empty((7, y.size))
    k[0] = f(t, y)
    h = min(_initial_step(f, t, y, k[0], rel_tol, abs_tol, t_end - t0), max_step)

    ts = [t]
    ys = [y.copy()]
    if stop_condition is not None and stop_condition(t, y):
        return np.array(ts), np.array(ys)

    while t < t_end:
        h = min(h, t_end - t)
        if h < 16 * np.finfo(float).eps * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t = {t:g}")

        for s in range(1, 7):
            k[s] = f(t + _C[s] * h, y + h * (_A[s] @ k[:s]))
        y_new = y + h * (_B @ k)
        error = h * (_E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = _error_norm(error, scale)

        if err <= 1.0:
            t = t + h
            y = y_new
            k[0] = k[6]  # first-same-as-last
            ts.append(t)
            ys.append(y.copy())
            factor = _MAX_FACTOR if err == 0 else min(
                _MAX_FACTOR, _SAFETY * err ** (-1.0 / _ORDER)
            )
            h = min(h * factor, max_step)
            if stop_condition is not None and stop_condition(t, y):
                break
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / _ORDER))

    return np.array(ts), np.array(ys)

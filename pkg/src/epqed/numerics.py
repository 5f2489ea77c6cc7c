"""Small numerical helpers shared across modules."""
from __future__ import annotations

import numpy as np


def rk4(f, y0: np.ndarray, t_grid: np.ndarray, step: float) -> np.ndarray:
    """Classical fixed-step RK4 for dy/dt = f(t, y), sampled at t_grid.

    Each sampling interval is cut into equal substeps no longer than step.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    y = np.asarray(y0, dtype=complex).copy()
    out = np.empty((len(t_grid),) + y.shape, dtype=complex)
    out[0] = y
    t = t_grid[0]
    for k in range(1, len(t_grid)):
        span = t_grid[k] - t
        nsub = max(1, int(np.ceil(span / step - 1e-12)))
        h = span / nsub
        for _ in range(nsub):
            k1 = f(t, y)
            k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = f(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        t = t_grid[k]
        out[k] = y
    return out


def quadratic_extremum(x: np.ndarray, y: np.ndarray, index: int) -> tuple[float, float]:
    """Refine a discrete extremum by a parabola through its three neighbors."""
    if index <= 0 or index >= len(x) - 1:
        return float(x[index]), float(y[index])
    x0, x1, x2 = x[index - 1], x[index], x[index + 1]
    y0, y1, y2 = y[index - 1], y[index], y[index + 1]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
    if a == 0:
        return float(x1), float(y1)
    xs = -b / (2 * a)
    if not (min(x0, x2) <= xs <= max(x0, x2)):
        return float(x1), float(y1)
    c = y1 - a * x1**2 - b * x1
    return float(xs), float(a * xs**2 + b * xs + c)


def local_maxima(y: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima."""
    y = np.asarray(y)
    return np.where((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1


def log_slope(t: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log(y) over t."""
    return float(np.polyfit(t, np.log(y), 1)[0])

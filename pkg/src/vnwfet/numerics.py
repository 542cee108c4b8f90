"""Special functions and nonlinear solvers used by the device model and the
circuit engine.

The Lambert W implementation uses a piecewise asymptotic initial guess
refined by Halley iterations, which converges to full double precision in a
handful of steps without any table storage.  ``lambert_w0_exp`` evaluates
W0(exp(y)) directly in log space so callers never have to form an
overflowing exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_INV_E = -math.exp(-1.0)


class DomainError(ValueError):
    """Argument outside the principal-branch domain."""


class ConvergenceError(RuntimeError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, message: str, best: np.ndarray | float | None = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 100
    abs_tolerance: float = 1e-12
    rel_tolerance: float = 1e-9
    damping_floor: float = 1.0 / 1024.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.abs_tolerance <= 0 or self.rel_tolerance <= 0:
            raise ValueError("tolerances must be > 0")
        if not (0.0 < self.damping_floor <= 1.0):
            raise ValueError("damping_floor must be in (0, 1]")


def _w0_initial_guess(x: np.ndarray) -> np.ndarray:
    """Piecewise starting point for Halley refinement on w*exp(w) = x."""
    w = np.empty_like(x)

    near_branch = x < -0.25 / math.e
    # Branch-point series in p = sqrt(2(e*x + 1)).
    p = np.sqrt(np.maximum(2.0 * (math.e * x[near_branch] + 1.0), 0.0))
    w[near_branch] = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3

    mid = (~near_branch) & (x < math.e)
    # log1p is exact at 0 and keeps the guess within the basin up to x = e.
    w[mid] = np.log1p(x[mid]) * (1.0 - np.log1p(np.log1p(np.abs(x[mid]))) / 2.0)

    large = x >= math.e
    lx = np.log(x[large])
    w[large] = lx - np.log(lx)
    return w


def lambert_w0(x):
    """Principal branch of the Lambert W function.

    Accepts a scalar or array; domain is x >= -1/e.  Relative residual of
    w*exp(w) against x is below 1e-12 over the whole domain.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)):
        raise DomainError("NaN input to lambert_w0")
    if np.any(arr < _INV_E):
        raise DomainError(f"lambert_w0 requires x >= -1/e, got min {arr.min()}")

    scalar = arr.ndim == 0
    w = _w0_initial_guess(np.atleast_1d(arr).copy())
    xv = np.atleast_1d(arr)
    for _ in range(6):
        ew = np.exp(w)
        f = w * ew - xv
        wp1 = w + 1.0
        # Halley step; the denominator guard only matters exactly at the
        # branch point where f is already ~0.
        denom = ew * wp1 - (w + 2.0) * f / np.where(wp1 > 0, 2.0 * wp1, 1.0)
        step = np.where(denom != 0.0, f / np.where(denom != 0.0, denom, 1.0), 0.0)
        w = w - step
    w = np.where(xv == 0.0, 0.0, w)
    return float(w[0]) if scalar else w.reshape(arr.shape)


def lambert_w0_exp(y: float) -> float:
    """W0(exp(y)) for scalar y, stable for arbitrarily large y.

    Solves w + log(w) = y when exp(y) would overflow (or lose precision);
    otherwise defers to the direct evaluation.  Used by the charge equations,
    whose Lambert arguments are exponentials of possibly huge bias terms.
    """
    if math.isnan(y):
        raise DomainError("NaN input to lambert_w0_exp")
    if y < 500.0:
        if y < -700.0:
            return 0.0
        return _lambert_w0_scalar(math.exp(y))
    # w ~ y - log(y); Newton on g(w) = w + log(w) - y (monotone, convex).
    w = y - math.log(y)
    for _ in range(4):
        g = w + math.log(w) - y
        w -= g / (1.0 + 1.0 / w)
    return w


def _lambert_w0_scalar(x: float) -> float:
    if x < _INV_E:
        raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if x < -0.25 / math.e:
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x < math.e:
        l1 = math.log1p(x)
        w = l1 * (1.0 - math.log1p(math.log1p(abs(x))) / 2.0)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    for _ in range(5):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1 if wp1 > 0 else 1.0)
        if denom == 0.0:
            break
        w -= f / denom
    return w


def newton_solve(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    x0,
    cfg: SolverConfig = SolverConfig(),
) -> np.ndarray:
    """Damped Newton iteration for residual(x) = 0.

    The step is halved whenever the residual infinity norm fails to decrease,
    down to cfg.damping_floor; this keeps the stiff exponential device
    characteristics from throwing the iterate out of range.
    """
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    f = np.atleast_1d(residual(x))
    fnorm = np.linalg.norm(f, ord=np.inf)
    for _ in range(cfg.max_iterations):
        if fnorm <= cfg.abs_tolerance:
            return x
        jac = np.atleast_2d(jacobian(x))
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular jacobian: {exc}", best=x) from exc
        damping = 1.0
        while True:
            x_new = x - damping * step
            f_new = np.atleast_1d(residual(x_new))
            fnorm_new = np.linalg.norm(f_new, ord=np.inf)
            if fnorm_new < fnorm or damping <= cfg.damping_floor:
                break
            damping *= 0.5
        # Also accept on step size: stalled residual with a converged iterate.
        dx = np.linalg.norm(x_new - x, ord=np.inf)
        xscale = max(np.linalg.norm(x, ord=np.inf), 1.0)
        x, f, fnorm = x_new, f_new, fnorm_new
        if fnorm <= cfg.abs_tolerance:
            return x
        if dx <= cfg.rel_tolerance * xscale and fnorm <= math.sqrt(cfg.abs_tolerance):
            return x
    if fnorm <= cfg.abs_tolerance:
        return x
    raise ConvergenceError(
        f"newton_solve did not converge in {cfg.max_iterations} iterations "
        f"(|f|_inf = {fnorm:.3e})",
        best=x,
    )

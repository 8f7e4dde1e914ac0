"""Small numerical routines: quadrature and finite differences.

Deterministic by construction; every routine visits points in a fixed
order so repeated calls give bit-identical results.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "adaptive_simpson",
    "composite_simpson",
    "central_diff",
]


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def _adaptive(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        # Richardson: S2 + delta/15 has one order higher accuracy
        return left + right + delta / 15.0
    return (
        _adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + _adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-8,
    max_depth: int = 24,
) -> float:
    """Adaptive Simpson quadrature of a scalar function on [a, b].

    Subdivides until the local Simpson discrepancy is below the
    (bisected) absolute tolerance or the recursion depth cap is hit,
    whichever comes first.  The cap keeps the cost bounded when the
    integrand carries small evaluation noise.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if b <= a:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, b, fa, fm, fb, whole, tol, max_depth)


def composite_simpson(f: Callable[[np.ndarray], np.ndarray], a: float,
                      b: float, panels: int = 64) -> float:
    """Composite Simpson rule with a fixed even number of panels.

    Suited to integrands that are themselves quadrature results, where
    adaptive refinement would chase evaluation noise.
    """
    if b <= a:
        return 0.0
    if panels % 2:
        panels += 1
    grid = np.linspace(a, b, panels + 1)
    fx = np.asarray([float(f(v)) for v in grid])
    weights = np.ones(panels + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float((b - a) / (3.0 * panels) * (weights * fx).sum())


def central_diff(f: Callable[[float], float], y: float, step: float):
    """First and second central difference of ``f`` at ``y``.

    Returns ``(d1, d2)`` using the three-point stencils
    ``(f(y+d) - f(y-d)) / (2d)`` and
    ``(f(y+d) - 2 f(y) + f(y-d)) / d^2``.
    """
    f_plus = f(y + step)
    f_minus = f(y - step)
    f_mid = f(y)
    d1 = (f_plus - f_minus) / (2.0 * step)
    d2 = (f_plus - 2.0 * f_mid + f_minus) / (step * step)
    return d1, d2

"""Bracketed scalar root finding: bisection first, then safeguarded secant steps."""

from __future__ import annotations

from typing import Callable

import numpy as np


class BracketError(RuntimeError):
    """The supplied interval does not bracket a sign change."""


def bracketed_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    xtol: float = 1e-13,
    max_iter: int = 200,
) -> float:
    """Root of a continuous ``f`` on ``[lo, hi]`` with a sign change across it.

    A secant step from the bracket endpoints is accepted only while it lands
    strictly inside the current bracket; otherwise the step falls back to the
    midpoint, so progress never degrades below bisection.
    """
    a, b = float(lo), float(hi)
    fa, fb = float(f(a)), float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: f(lo)={fa:.6g}, f(hi)={fb:.6g}"
        )
    for _ in range(max_iter):
        width = abs(b - a)
        if width <= xtol * max(1.0, abs(a), abs(b)):
            break
        guard = 0.01 * width
        if fb != fa:
            x = b - fb * (b - a) / (fb - fa)
        else:
            x = 0.5 * (a + b)
        inner_lo, inner_hi = min(a, b) + guard, max(a, b) - guard
        if not (inner_lo <= x <= inner_hi):
            x = 0.5 * (a + b)
        fx = float(f(x))
        if fx == 0.0:
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
    return 0.5 * (a + b)


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    factor: float = 2.0,
    max_expand: int = 60,
) -> tuple[float, float]:
    """Grow ``[lo, hi]`` geometrically around its centre until ``f`` changes sign."""
    lo, hi = float(lo), float(hi)
    flo, fhi = float(f(lo)), float(f(hi))
    for _ in range(max_expand):
        if np.sign(flo) != np.sign(fhi) or flo == 0.0 or fhi == 0.0:
            return lo, hi
        mid = 0.5 * (lo + hi)
        half = max(0.5 * (hi - lo), 1e-6) * factor
        lo, hi = mid - half, mid + half
        flo, fhi = float(f(lo)), float(f(hi))
    raise BracketError(f"could not bracket a sign change near [{lo:.6g}, {hi:.6g}]")

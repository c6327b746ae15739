"""Univariate convex transforms and their conjugates.

A ``Transform`` bundles a convex ``phi`` on [0, inf) with its conjugate
``psi`` and the derivatives of ``psi``.  ``phi`` is normalized so that
``phi(1) = 0`` and ``phi >= 0``; dually ``psi(0) = 0`` and ``psi'(0) = 1``.
``psi'`` is the statewise response map: it sends a net payoff to a likelihood
ratio, and its inverse is ``phi'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._rootfind import BracketError, bracketed_root, expand_bracket


@dataclass(frozen=True)
class Transform:
    family: str
    params: dict
    phi: Callable
    phi_prime: Callable
    psi: Callable
    psi_prime: Callable
    psi_pp: Callable | None = None
    psi_ppp: Callable | None = None
    # open interval of values attainable by psi'; bounds may be 0 or inf
    psi_prime_range: tuple[float, float] = (0.0, math.inf)
    # psi'' discontinuity points, where curvature indices are unreliable
    kinks: tuple[float, ...] = ()

    def near_kink(self, x: float, tol: float = 1e-6) -> bool:
        return any(abs(x - k) < tol for k in self.kinks)

    def phi_at_zero(self) -> float:
        return float(self.phi(0.0))


def shannon(kappa: float = 1.0) -> Transform:
    """phi(t) = kappa (t log t - t + 1); psi(t) = kappa (e^{t/kappa} - 1)."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    k = float(kappa)

    def phi(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t > 0, k * (t * np.log(np.where(t > 0, t, 1.0)) - t + 1), k)
        return out if out.ndim else float(out)

    def phi_prime(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = k * np.log(t)
        return out if out.ndim else float(out)

    return Transform(
        family="shannon",
        params={"kappa": k},
        phi=phi,
        phi_prime=phi_prime,
        psi=lambda t: k * np.expm1(np.asarray(t, dtype=float) / k),
        psi_prime=lambda t: np.exp(np.asarray(t, dtype=float) / k),
        psi_pp=lambda t: np.exp(np.asarray(t, dtype=float) / k) / k,
        psi_ppp=lambda t: np.exp(np.asarray(t, dtype=float) / k) / k**2,
        psi_prime_range=(0.0, math.inf),
    )


def chi2(kappa: float = 1.0) -> Transform:
    """phi(t) = kappa (t-1)^2 / 2; psi(t) = max(t^2/(2 kappa) + t, -kappa/2).

    psi'' at the kink t = -kappa is set to 1/(2 kappa) by convention;
    curvature indices are unreliable within ~1e-6 of the kink.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    k = float(kappa)

    def psi(t):
        # the parabola is tangent to the flat level at the kink and lies above
        # it elsewhere, so the conjugate must switch branches explicitly
        t = np.asarray(t, dtype=float)
        out = np.where(t >= -k, t * t / (2 * k) + t, -k / 2)
        return out if out.ndim else float(out)

    def psi_prime(t):
        t = np.asarray(t, dtype=float)
        out = np.maximum(t / k + 1.0, 0.0)
        return out if out.ndim else float(out)

    def psi_pp(t):
        t = np.asarray(t, dtype=float)
        out = np.where(t > -k, 1.0 / k, np.where(t == -k, 1.0 / (2 * k), 0.0))
        return out if out.ndim else float(out)

    def psi_ppp(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        return out if out.ndim else 0.0

    return Transform(
        family="chi2",
        params={"kappa": k},
        phi=lambda t: k * (np.asarray(t, dtype=float) - 1.0) ** 2 / 2,
        phi_prime=lambda t: k * (np.asarray(t, dtype=float) - 1.0),
        psi=psi,
        psi_prime=psi_prime,
        psi_pp=psi_pp,
        psi_ppp=psi_ppp,
        psi_prime_range=(0.0, math.inf),
        kinks=(-k,),
    )


def _adaptive_simpson(f, a, b, tol=1e-10, max_depth=48):
    """Recursive adaptive Simpson quadrature of f on [a, b]."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, eps, depth):
        x1 = 0.5 * (x0 + x2)
        lm, rm = 0.5 * (x0 + x1), 0.5 * (x1 + x2)
        flm, frm = f(lm), f(rm)
        left = simpson(x0, x1, f0, flm, f1)
        right = simpson(x1, x2, f1, frm, f2)
        if depth >= max_depth or abs(left + right - whole) <= 15.0 * eps:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, x1, f0, flm, f1, left, eps / 2, depth + 1) + recurse(
            x1, x2, f1, frm, f2, right, eps / 2, depth + 1
        )

    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def tabulated(psi_prime_table) -> Transform:
    """Transform from a strictly increasing table of (t, psi'(t)) pairs.

    The table is interpolated with a shape-preserving monotone cubic,
    extrapolated log-linearly on the right and linearly toward zero on the
    left; ``psi`` is recovered by adaptive quadrature anchored at
    ``psi(0) = 0`` and ``phi`` through the conjugacy identity
    ``phi(s) = s t - psi(t)`` at ``t = phi'(s)``.
    """
    pts = np.asarray(psi_prime_table, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("expected at least three (t, value) rows")
    ts, vs = pts[:, 0], pts[:, 1]
    if np.any(np.diff(ts) <= 0):
        raise ValueError("table abscissae must be strictly increasing")
    if np.any(vs <= 0) or np.any(np.diff(vs) <= 0):
        raise ValueError("psi' values must be positive and strictly increasing")
    interp = PchipInterpolator(ts, vs, extrapolate=False)
    d = interp.derivative()
    t0, tN = float(ts[0]), float(ts[-1])
    v0, vN = float(vs[0]), float(vs[-1])
    slope_left = max(float(d(t0)), (vs[1] - vs[0]) / (ts[1] - ts[0]) * 1e-3)
    rate_right = max(float(d(tN)) / vN, (np.log(vs[-1]) - np.log(vs[-2])) / (ts[-1] - ts[-2]) * 1e-3)
    t_zero = t0 - v0 / slope_left

    def psi_prime(t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(arr)
        left = arr < t0
        right = arr > tN
        mid = ~(left | right)
        out[mid] = interp(arr[mid])
        out[left] = np.maximum(v0 + slope_left * (arr[left] - t0), 0.0)
        out[right] = vN * np.exp(rate_right * (arr[right] - tN))
        return out if np.asarray(t).ndim else float(out[0])

    scalar_pp = psi_prime  # closed over below

    @lru_cache(maxsize=16384)
    def psi_scalar(t: float) -> float:
        return _adaptive_simpson(lambda s: float(scalar_pp(np.asarray([s]))[0]), 0.0, t)

    def psi(t):
        arr = np.asarray(t, dtype=float)
        out = np.array([psi_scalar(float(x)) for x in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else float(out)

    one = float(psi_prime(np.asarray([0.0]))[0])
    if abs(one - 1.0) > 1e-8:
        raise ValueError(f"psi'(0) = {one:.6g}, table violates the normalization psi'(0) = 1")

    def _phi_prime_scalar(si: float) -> float:
        if si <= 0.0:
            return t_zero
        f = lambda t: float(scalar_pp(np.asarray([t]))[0]) - si
        lo, hi = expand_bracket(f, min(t_zero, t0) - 1.0, tN + 1.0)
        return bracketed_root(f, lo, hi)

    def phi_prime(s):
        arr = np.asarray(s, dtype=float)
        out = np.array([_phi_prime_scalar(float(x)) for x in arr.ravel()]).reshape(arr.shape)
        return out if arr.ndim else float(out)

    def phi(s):
        arr = np.asarray(s, dtype=float)
        flat = []
        for si in arr.ravel():
            u = _phi_prime_scalar(float(si))
            flat.append(float(si) * u - psi_scalar(float(u)))
        out = np.array(flat).reshape(arr.shape)
        return out if arr.ndim else float(out)

    def psi_pp(t):
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        h = 1e-6 * np.maximum(1.0, np.abs(arr))
        out = (psi_prime(arr + h) - psi_prime(arr - h)) / (2 * h)
        return out if np.asarray(t).ndim else float(out[0])

    return Transform(
        family="tabulated",
        params={"n_points": len(ts), "t_zero": t_zero},
        phi=phi,
        phi_prime=phi_prime,
        psi=psi,
        psi_prime=psi_prime,
        psi_pp=psi_pp,
        psi_ppp=None,
        psi_prime_range=(0.0, math.inf),
        kinks=(t_zero,),
    )


def scale_transform(t: Transform, kappa: float) -> Transform:
    """Transform of the cost scaled by kappa: phi_k = kappa phi, psi_k = kappa psi(t/kappa)."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if kappa == 1.0:
        return t
    k = float(kappa)
    lo, hi = t.psi_prime_range
    return Transform(
        family=t.family,
        params={**t.params, "scale": k * t.params.get("scale", 1.0)},
        phi=lambda s: k * t.phi(s),
        phi_prime=lambda s: k * t.phi_prime(s),
        psi=lambda x: k * t.psi(np.asarray(x, dtype=float) / k),
        psi_prime=lambda x: t.psi_prime(np.asarray(x, dtype=float) / k),
        psi_pp=(lambda x: t.psi_pp(np.asarray(x, dtype=float) / k) / k) if t.psi_pp else None,
        psi_ppp=(lambda x: t.psi_ppp(np.asarray(x, dtype=float) / k) / k**2) if t.psi_ppp else None,
        psi_prime_range=(lo, hi),
        kinks=tuple(k * x for x in t.kinks),
    )


def _golden_max(g, lo, hi, iters=120):
    """Golden-section maximization of a unimodal g on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    x = 0.5 * (a + b)
    return x, g(x)


def conjugate_check(t: Transform, grid) -> float:
    """Max over the grid of |psi(x) - sup_{s>=0}(x s - phi(s))|.

    The inner supremum is computed by golden-section search over phi's
    domain; raises if phi returns NaN inside its declared domain.
    """
    worst = 0.0
    for x in np.atleast_1d(np.asarray(grid, dtype=float)):
        s_hint = float(t.psi_prime(x))
        hi = max(4.0 * s_hint, 2.0)

        def g(s):
            val = float(t.phi(s))
            if math.isnan(val):
                raise ValueError(f"phi returned NaN at s={s:.6g}")
            return x * s - val

        # widen until the bracket provably contains the maximizer
        while g(hi) > g(0.9 * hi) and hi < 1e12:
            hi *= 4.0
        _, best = _golden_max(g, 0.0, hi)
        best = max(best, g(0.0))
        worst = max(worst, abs(float(t.psi(x)) - best))
    return worst


def shift_transform(t: Transform, k: float) -> Transform:
    """Reparametrized transform whose conjugate is psi_k(x) = (psi(x+t_k) - psi(t_k))/k.

    ``t_k`` solves psi'(t_k) = k, so psi_k(0) = 0 and psi_k'(0) = 1 hold by
    construction and the curvature index of psi_k is that of psi shifted by
    t_k.  ``k`` must lie in the interior of the image of psi'.
    """
    lo, hi = t.psi_prime_range
    if not (lo < k < hi):
        raise ValueError(f"k={k:.6g} outside the image ({lo:.3g}, {hi:.3g}) of psi'")
    f = lambda x: float(t.psi_prime(x)) - k
    blo, bhi = expand_bracket(f, -1.0, 1.0)
    t_k = bracketed_root(f, blo, bhi)
    psi_tk = float(t.psi(t_k))
    phi_k_at = float(t.phi_prime(k))

    return Transform(
        family=f"shifted_{t.family}",
        params={**t.params, "k": float(k), "t_k": t_k},
        phi=lambda s: (t.phi(k * np.asarray(s, dtype=float)) - t.phi(k)) / k
        - (np.asarray(s, dtype=float) - 1.0) * phi_k_at,
        phi_prime=lambda s: t.phi_prime(k * np.asarray(s, dtype=float)) - phi_k_at,
        psi=lambda x: (t.psi(np.asarray(x, dtype=float) + t_k) - psi_tk) / k,
        psi_prime=lambda x: t.psi_prime(np.asarray(x, dtype=float) + t_k) / k,
        psi_pp=(lambda x: t.psi_pp(np.asarray(x, dtype=float) + t_k) / k) if t.psi_pp else None,
        psi_ppp=(lambda x: t.psi_ppp(np.asarray(x, dtype=float) + t_k) / k) if t.psi_ppp else None,
        psi_prime_range=(lo / k, hi / k if hi != math.inf else math.inf),
        kinks=tuple(x - t_k for x in t.kinks),
    )


def risk_indices(t: Transform, x: float) -> tuple[float, float]:
    """Curvature index psi''/psi' and prudence index psi'''/psi'' at x.

    Falls back to centered finite differences with step 1e-5 * max(1, |x|)
    when analytic derivatives are unavailable.  Values within ~1e-6 of a
    psi'' kink are unreliable; see ``Transform.near_kink``.
    """
    x = float(x)
    p1 = float(t.psi_prime(x))
    if p1 <= 0.0:
        raise ValueError("psi'(x) must be positive for the curvature index")
    h = 1e-5 * max(1.0, abs(x))
    if t.psi_pp is not None:
        p2 = float(t.psi_pp(x))
    else:
        p2 = (float(t.psi_prime(x + h)) - float(t.psi_prime(x - h))) / (2 * h)
    if p2 == 0.0:
        raise ValueError("flat second derivative: prudence index undefined")
    if t.psi_ppp is not None:
        p3 = float(t.psi_ppp(x))
    else:
        p3 = (
            float(t.psi_prime(x + h)) - 2.0 * p1 + float(t.psi_prime(x - h))
        ) / (h * h)
    return p2 / p1, p3 / p2


def psi_inverse(t: Transform, y: float) -> float:
    """Inverse of the increasing map psi, by bracketed root finding."""
    f = lambda x: float(t.psi(x)) - y
    lo, hi = expand_bracket(f, -1.0, 1.0)
    return bracketed_root(f, lo, hi)


__all__ = [
    "Transform",
    "shannon",
    "chi2",
    "tabulated",
    "scale_transform",
    "shift_transform",
    "conjugate_check",
    "risk_indices",
    "psi_inverse",
    "BracketError",
]

"""Weighted areas, ball areas, growth fits and the linear envelope of |H|.

Rotationally symmetric surfaces (canonical examples and revolved profiles) are
integrated along a single line: sigma = density(s) ds with density
|S^(n-1)| v(s)^(n-1) for a profile, or the analogous product factor for cylinders.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from .canonical import CanonicalSurface
from .geometry import ImmersedPatch, ParamGrid
from .profile import ProfilePath, RevolvedSurface, revolve


def sphere_volume(m: int) -> float:
    """Area of the unit m-sphere; the 0-sphere counts its two points."""
    return 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)


@dataclass
class LineMeasure:
    """A surface measure pushed forward to an interval [a, b] of a line parameter s."""
    span: tuple
    radius2: Callable        # |x|^2 as a function of s
    density: Callable        # area per unit s
    absH: Callable           # |H| as a function of s
    normA2: Callable


def _const(c):
    return lambda s: np.full(np.shape(s), float(c))


def line_measure(surface) -> LineMeasure:
    if isinstance(surface, ProfilePath):
        surface = revolve(surface)
    if isinstance(surface, RevolvedSurface):
        n = surface.n
        a, b = surface.s_span

        def curvatures(s):
            # profile and orbit curvatures; the orbit one takes its umbilic limit at the axis
            s = np.asarray(s, dtype=float)
            th, k1 = surface._theta(s), surface._theta(s, 1)
            if n == 1:
                return k1, np.zeros_like(k1)
            _, v = surface.profile(s)
            with np.errstate(divide="ignore", invalid="ignore"):
                ko = np.where(np.abs(v) < 1e-6, k1, -np.cos(th) / v)
            return k1, ko

        def absH(s):
            k1, ko = curvatures(s)
            return np.abs(k1 + (n - 1) * ko)

        def normA2(s):
            k1, ko = curvatures(s)
            return k1 ** 2 + (n - 1) * ko ** 2

        def r2(s):
            u, v = surface.profile(s)
            return u * u + v * v

        def dens(s):
            if n == 1:
                return np.ones(np.shape(s))
            _, v = surface.profile(s)
            return sphere_volume(n - 1) * np.abs(v) ** (n - 1)

        return LineMeasure((a, b), r2, dens, absH, normA2)
    if isinstance(surface, CanonicalSurface):
        n, k = surface.n, surface.k
        eig = surface.exact_principal()
        absH, A2 = abs(eig.sum()), float((eig ** 2).sum())
        if surface.kind == "sphere":
            r = surface.r
            if n == 1:
                return LineMeasure((0.0, 2 * math.pi * r), _const(r * r), _const(1.0),
                                   _const(absH), _const(A2))
            dens = lambda s: sphere_volume(n - 1) * (r * np.sin(s / r)) ** (n - 1)
            return LineMeasure((0.0, math.pi * r), _const(r * r), dens, _const(absH), _const(A2))
        # flat factor of dimension m = n - k, integrated in its radial variable
        m = n - k
        core2 = surface.r ** 2 if surface.kind == "cylinder" else surface.d ** 2
        core = sphere_volume(k) * surface.r ** k if surface.kind == "cylinder" else 1.0
        dens = lambda s: core * sphere_volume(m - 1) * s ** (m - 1)
        return LineMeasure((0.0, surface.L), lambda s: core2 + s * s, dens,
                           _const(absH), _const(A2))
    raise TypeError(f"no line measure for {type(surface).__name__}")


def _odd(count: int) -> int:
    return count + 1 - count % 2


def _inside_intervals(lm: LineMeasure, R: float, scan: int = 20001) -> list:
    a, b = lm.span
    s = np.linspace(a, b, scan)
    g = R * R - lm.radius2(s)
    inside = g >= 0
    out = []
    i = 0
    while i < scan:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < scan and inside[j + 1]:
            j += 1
        f = lambda t: R * R - float(lm.radius2(np.array([t]))[0])
        lo = s[i] if i == 0 else brentq(f, s[i - 1], s[i], xtol=1e-14)
        hi = s[j] if j == scan - 1 else brentq(f, s[j], s[j + 1], xtol=1e-14)
        if hi > lo:
            out.append((lo, hi))
        i = j + 1
    return out


def _line_integral(lm: LineMeasure, integrand, R: float, points: int) -> float:
    total = 0.0
    a, b = lm.span
    for lo, hi in _inside_intervals(lm, R):
        count = _odd(max(257, int(points * (hi - lo) / (b - a))))
        s = np.linspace(lo, hi, count)
        total += simpson(integrand(s) * lm.density(s), x=s)
    return float(total)


def _d4(f, dx, axis):
    """Fourth-order first derivative along an axis (one-sided near the ends)."""
    f = np.moveaxis(f, axis, 0)
    out = np.empty_like(f)
    out[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / 12
    out[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / 12
    out[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / 12
    out[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / 12
    out[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / 12
    return np.moveaxis(out / dx, 0, axis)


def _patch_integral(patch: ImmersedPatch, weight, R: float, h: float | None) -> float:
    grid = ParamGrid.over(patch.domain, patch.resolution if h is None else h, min_points=5)
    grid = ParamGrid(tuple(a if len(a) % 2 else np.linspace(a[0], a[-1], len(a) + 1)
                           for a in grid.axes))
    X = np.asarray(patch.embedding(grid.points), dtype=float)
    T = np.stack([_d4(X, dx, i) for i, dx in enumerate(grid.spacing)], axis=-2)
    g = np.einsum("...ik,...jk->...ij", T, T)
    r2 = np.einsum("...k,...k->...", X, X)
    f = np.sqrt(np.linalg.det(g)) * weight(r2) * (r2 <= R * R)
    for axis in reversed(range(len(grid.axes))):
        f = simpson(f, x=grid.axes[axis], axis=axis)
    return float(f)


def weighted_area(surface, alpha: float, R: float, points: int = 40001,
                  h: float | None = None) -> float:
    """Integral of exp(-alpha |x|^2 / 4) over the part of the surface in the ball of radius R.

    Flat factors of canonical examples are cut at radius L of the example.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    weight = lambda r2: np.exp(-alpha * r2 / 4)
    if isinstance(surface, ImmersedPatch):
        return _patch_integral(surface, weight, R, h)
    lm = line_measure(surface)
    return _line_integral(lm, lambda s: weight(lm.radius2(s)), R, points)


def ball_area(surface, r: float, **kw) -> float:
    """Unweighted area of the surface inside the ball of radius r."""
    return weighted_area(surface, 0.0, r, **kw)


def weighted_integral(surface, integrand: str, alpha: float, R: float,
                      points: int = 40001) -> float:
    """Integral of |A|^2 or |H|^delta style fields with the Gaussian-type weight."""
    lm = line_measure(surface)
    fields = {"normA2": lm.normA2, "absH": lm.absH}
    f = fields[integrand]
    return _line_integral(lm, lambda s: f(s) * np.exp(-alpha * lm.radius2(s) / 4), R, points)


@dataclass
class GrowthFit:
    C: float
    slope: float
    window: tuple
    alpha: float | None = None

    def to_dict(self) -> dict:
        return {"C": self.C, "slope": self.slope, "alpha": self.alpha}

    def within(self, alpha: float, slack: float = 0.05) -> bool:
        return self.slope <= alpha + slack


@dataclass
class AreaSeries:
    radii: np.ndarray
    areas: np.ndarray
    alpha: float
    fit: GrowthFit | None = None


def growth_fit(series, alpha: float | None = None, window=None) -> GrowthFit:
    """Least squares of log(area) against r^2/4 over the window (default: upper half)."""
    if isinstance(series, AreaSeries):
        radii, areas = series.radii, series.areas
        alpha = series.alpha if alpha is None else alpha
    else:
        radii, areas = series
    radii = np.asarray(radii, dtype=float)
    areas = np.asarray(areas, dtype=float)
    if window is None:
        window = (len(radii) // 2, len(radii))
    lo, hi = window
    if hi - lo < 8:
        raise ValueError("need at least 8 radii in the fit window")
    r, a = radii[lo:hi], areas[lo:hi]
    if np.any(a <= 0):
        raise ValueError("areas in the fit window must be positive")
    slope, icpt = np.polyfit(r * r / 4, np.log(a), 1)
    return GrowthFit(float(math.exp(icpt)), float(slope), (lo, hi), alpha)


def area_series(surface, radii, alpha: float = 0.0, window=None) -> AreaSeries:
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise ValueError("radii must increase")
    areas = np.array([ball_area(surface, r) for r in radii])
    series = AreaSeries(radii, areas, alpha)
    if len(radii) >= 16:
        series.fit = growth_fit(series, alpha, window)
    return series


@dataclass
class LinearBound:
    a: float
    b: float
    alpha_star: float
    flagged: bool = False


def linear_envelope(dist, absH, a_grid=None) -> LinearBound:
    """Envelope |H| <= a|x| + b over samples.

    For each a on the grid, b(a) is the smallest admissible offset (clipped at 0);
    the pair minimizing the total slack sum(a|x| + b - |H|) wins, smallest a on ties.
    """
    dist = np.asarray(dist, dtype=float).ravel()
    absH = np.asarray(absH, dtype=float).ravel()
    a_grid = np.linspace(0.0, 1.0, 2001) if a_grid is None else np.asarray(a_grid, dtype=float)
    best = None
    for a in a_grid:
        b = max(0.0, float(np.max(absH - a * dist)))
        slack = float(np.sum(a * dist + b - absH))
        if best is None or slack < best[0] - 1e-12 * max(1.0, abs(best[0])):
            best = (slack, a, b)
    _, a, b = best
    if a < 0.5:
        return LinearBound(float(a), b, float(4 * a * a / (1 - 4 * a * a)))
    return LinearBound(float(a), b, math.inf, flagged=True)


def mean_curvature_linear_bound(surface, radii=None, samples: int = 4001) -> LinearBound:
    """Linear envelope of |H| against |x| over the surface inside the largest radius."""
    lm = line_measure(surface)
    s = np.linspace(*lm.span, samples)
    dist = np.sqrt(lm.radius2(s))
    absH = lm.absH(s)
    if radii is not None:
        keep = dist <= float(np.max(radii))
        dist, absH = dist[keep], absH[keep]
    return linear_envelope(dist, absH)


@dataclass
class HIntegral:
    value: float
    radii: np.ndarray
    increments: np.ndarray
    last_ratio: float


def weighted_H_integral(surface, delta: float, alpha: float, R: float,
                        steps: int = 10) -> HIntegral:
    """Truncated integral of |H|^delta exp(-alpha|x|^2/4) with increments over a radius ladder.

    The ratio of the last two increments is a finiteness diagnostic: a value well
    below 1 means the tail is decaying.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    lm = line_measure(surface)
    f = lambda s: lm.absH(s) ** delta * np.exp(-alpha * lm.radius2(s) / 4)
    radii = np.linspace(R / steps, R, steps)
    vals = np.array([_line_integral(lm, f, r, 40001) for r in radii])
    inc = np.diff(np.concatenate([[0.0], vals]))
    floor = 1e-13 * max(abs(vals[-1]), 1.0)
    if abs(inc[-2]) <= floor:
        ratio = 0.0   # both last increments are at round-off
    else:
        ratio = float(inc[-1] / inc[-2])
    return HIntegral(float(vals[-1]), radii, inc, ratio)

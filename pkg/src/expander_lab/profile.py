"""Rotationally symmetric expanders and planar expander curves via the profile ODE.

The immersion is F(s, w) = (u(s), v(s) w) with w on the unit (n-1)-sphere,
u' = cos(theta), v' = sin(theta) and unit normal (-sin(theta), cos(theta) w).
Then the profile principal curvature is theta', the orbit ones are -cos(theta)/v,
and the expander equation becomes

    theta' = (n-1) cos(theta)/v + (v cos(theta) - u sin(theta))/2 - lambda.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit
from scipy.optimize import brentq, minimize_scalar

from .canonical import _angle_domain, complex_step_tangents, sphere_map
from .errors import AxisSingularity, DegeneratePath, InvalidDimension
from .geometry import ExpanderSpec, ImmersedPatch, JetField, ParamGrid, assemble_jets

V_AXIS_EPS = 1e-6
SENTINEL = 1e3

# termination codes returned by the kernel
_SMAX, _AXIS, _PLANE, _NONFINITE, _FULL = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class ProfileState:
    s: float
    u: float
    v: float
    theta: float


@dataclass(frozen=True)
class Termination:
    kind: str                   # "ReachedSmax", "AxisHit", "NonFinite" or "PlaneCross"
    s: float | None = None
    theta: float | None = None


@dataclass
class ProfilePath:
    spec: ExpanderSpec
    s: np.ndarray
    u: np.ndarray
    v: np.ndarray
    theta: np.ndarray
    step: float
    terminated_by: Termination
    planar: bool = False

    def __len__(self):
        return len(self.s)

    @property
    def states(self) -> list:
        return [ProfileState(*row) for row in zip(self.s, self.u, self.v, self.theta)]

    @property
    def closure_defect(self) -> float | None:
        t = self.terminated_by
        return None if t.kind != "AxisHit" else t.theta + math.pi / 2

    def theta_prime(self) -> np.ndarray:
        """Curvature theta' at every sample, with the axis limit where v is tiny."""
        return _theta_prime(self.s, self.u, self.v, self.theta, self.spec, self.planar)

    def truncated(self, s_stop: float) -> "ProfilePath":
        keep = self.s <= s_stop
        return replace(self, s=self.s[keep], u=self.u[keep], v=self.v[keep],
                       theta=self.theta[keep], terminated_by=Termination("ReachedSmax"))


@dataclass
class ShootingResult:
    lam: float
    n: int
    roots: list                 # (u0, radius_estimate) pairs
    objective_samples: list     # (u0, closure_defect) pairs
    closure_angles: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "n": self.n,
                "roots": [{"u0": u, "radius": r} for u, r in self.roots],
                "samples": [[u, d] for u, d in self.objective_samples]}


def profile_rhs(state: ProfileState, spec: ExpanderSpec, v_axis_eps: float = V_AXIS_EPS):
    """(du, dv, dtheta) at a state off the axis."""
    if spec.n > 1 and state.v <= v_axis_eps:
        raise AxisSingularity(f"v = {state.v} is within {v_axis_eps} of the axis")
    c, s = math.cos(state.theta), math.sin(state.theta)
    orbit = (spec.n - 1) * c / state.v if spec.n > 1 else 0.0
    return c, s, orbit + 0.5 * (state.v * c - state.u * s) - spec.lam


def axis_slope(u0: float, spec: ExpanderSpec) -> float:
    """theta'(0) for a profile leaving the axis at u0 with theta = pi/2."""
    return -(spec.lam + 0.5 * u0) / spec.n


def axis_series(u0: float, spec: ExpanderSpec, s: float):
    """Taylor expansion of (u, v, theta) near the axis start, accurate to O(s^5)."""
    n = spec.n
    a = axis_slope(u0, spec)
    c = a * (u0 * a - 1.0) / (4.0 * (n + 2))
    u = u0 - a * s * s / 2 - (c - a ** 3 / 6) * s ** 4 / 4
    v = s - a * a * s ** 3 / 6
    return u, v, math.pi / 2 + a * s + c * s ** 3


@njit(cache=True, nogil=True)
def _rhs(u, v, th, nm1, lam):
    c = math.cos(th)
    s = math.sin(th)
    dth = 0.5 * (v * c - u * s) - lam
    if nm1 > 0:
        dth += nm1 * c / v
    return c, s, dth


@njit(cache=True, nogil=True)
def _rk4(u, v, th, dt, nm1, lam):
    k1u, k1v, k1t = _rhs(u, v, th, nm1, lam)
    k2u, k2v, k2t = _rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, th + 0.5 * dt * k1t, nm1, lam)
    k3u, k3v, k3t = _rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, th + 0.5 * dt * k2t, nm1, lam)
    k4u, k4v, k4t = _rhs(u + dt * k3u, v + dt * k3v, th + dt * k3t, nm1, lam)
    return (u + dt * (k1u + 2 * k2u + 2 * k3u + k4u) / 6,
            v + dt * (k1v + 2 * k2v + 2 * k3v + k4v) / 6,
            th + dt * (k1t + 2 * k2t + 2 * k3t + k4t) / 6)


@njit(cache=True, nogil=True)
def _march(s, u, v, th, h, s_max, nm1, lam, axis_guard, stop_on_plane, v_eps, out):
    """Uniform RK4 steps from (s, u, v, th); rows of out receive (s, u, v, th).

    Near the axis on a descending path the step shrinks to v/4 so the approach
    can be followed down to v_eps.
    """
    cap = out.shape[0]
    out[0, 0] = s
    out[0, 1] = u
    out[0, 2] = v
    out[0, 3] = th
    k = 1
    while s < s_max - 1e-6 * h:
        if k >= cap:
            return k, 4
        dt = min(h, s_max - s)
        if axis_guard and math.sin(th) < 0.0 and v < 2.0 * h:
            if v <= v_eps:
                return k, 1
            dt = min(dt, 0.25 * v)
        un, vn, tn = _rk4(u, v, th, dt, nm1, lam)
        if not (math.isfinite(un) and math.isfinite(vn) and math.isfinite(tn)):
            return k, 3
        if axis_guard and vn <= 0.0:
            return k, 1
        plane = stop_on_plane and u < 0.0 and un >= 0.0
        s = s + dt
        u, v, th = un, vn, tn
        out[k, 0] = s
        out[k, 1] = u
        out[k, 2] = v
        out[k, 3] = th
        k += 1
        if plane:
            return k, 2
    return k, 0


def _run(s, u, v, th, h, s_max, nm1, lam, axis_guard, stop_on_plane):
    chunks = []
    while True:
        cap = int((s_max - s) / h) + 4096
        buf = np.empty((min(cap, 2_000_000), 4))
        count, status = _march(s, u, v, th, h, s_max, nm1, lam,
                               axis_guard, stop_on_plane, V_AXIS_EPS, buf)
        chunks.append(buf[:count] if not chunks else buf[1:count])
        if status != _FULL:
            return np.concatenate(chunks), status
        s, u, v, th = buf[count - 1]


def _default_step(u0: float) -> float:
    return 1e-3 * max(1.0, abs(u0))


def _hermite(s0, s1, y0, y1, d0, d1, t):
    """Cubic Hermite value on [s0, s1] at t (t may lie slightly outside)."""
    dt = s1 - s0
    x = (t - s0) / dt
    h00 = 2 * x ** 3 - 3 * x ** 2 + 1
    h10 = x ** 3 - 2 * x ** 2 + x
    h01 = -2 * x ** 3 + 3 * x ** 2
    h11 = x ** 3 - x ** 2
    return h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1


def _rhs_arrays(u, v, th, spec, planar):
    c, s = np.cos(th), np.sin(th)
    dth = 0.5 * (v * c - u * s) - spec.lam
    if not planar and spec.n > 1:
        dth = dth + (spec.n - 1) * c / v
    return c, s, dth


def _theta_prime(s, u, v, th, spec, planar):
    with np.errstate(divide="ignore", invalid="ignore"):
        _, _, dth = _rhs_arrays(u, v, th, spec, planar)
    if not planar and spec.n > 1:
        # axis limit: (n-1) cos(theta)/v -> -(n-1) theta', so n theta' = -u sin(theta)/2 - lambda
        near = v < 1e-4
        dth = np.where(near, (-0.5 * u * np.sin(th) - spec.lam) / spec.n, dth)
    return dth


def _theta_second(u, v, th, dth, spec, planar):
    """theta'' by the chain rule along the flow; set to zero at the axis, where theta is odd."""
    c, s = np.cos(th), np.sin(th)
    fu = -0.5 * s
    fv = 0.5 * c
    ft = -0.5 * (v * s + u * c)
    if not planar and spec.n > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            fv = fv - (spec.n - 1) * c / v ** 2
            ft = ft - (spec.n - 1) * s / v
    with np.errstate(invalid="ignore"):
        out = fu * c + fv * s + ft * dth
    if not planar and spec.n > 1:
        out = np.where(v < 1e-4, 0.0, out)
    return out


def _bisect(fn, a, b, tol=1e-12, max_iter=200):
    fa = fn(a)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        m = 0.5 * (a + b)
        fm = fn(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _locate_axis(rows, spec):
    """Arclength and angle where v reaches zero, extrapolated from the last two samples."""
    (s0, u0, v0, t0), (s1, u1, v1, t1) = rows[-2], rows[-1]
    d0, d1 = _theta_prime(np.array([s0, s1]), np.array([u0, u1]), np.array([v0, v1]),
                          np.array([t0, t1]), spec, False)
    vf = lambda t: _hermite(s0, s1, v0, v1, math.sin(t0), math.sin(t1), t)
    reach = s1 + 2.0 * v1 / max(abs(math.sin(t1)), 1e-3)
    if vf(reach) <= 0:
        s_hit = _bisect(vf, s1, reach)
    else:
        s_hit = s1 + v1 / max(abs(math.sin(t1)), 1e-3)
    return s_hit, _hermite(s0, s1, t0, t1, d0, d1, s_hit)


def integrate_profile(u0: float, spec: ExpanderSpec, s_max: float = 50.0,
                      h_ode: float | None = None) -> ProfilePath:
    """Integrate a profile leaving the axis orthogonally at (u0, 0).

    The first half step uses the axis series; after that, classical RK4 with
    uniform steps h_ode, so samples sit on the lattice s = k h_ode.
    """
    if spec.n < 2:
        raise InvalidDimension("axis profiles need n >= 2; use planar_curve for n = 1")
    h = _default_step(u0) if h_ode is None else float(h_ode)
    if not (s_max > 0 and h > 0):
        raise ValueError("s_max and h_ode must be positive")
    nm1 = float(spec.n - 1)
    head = [(0.0, u0, 0.0, math.pi / 2)]
    half = min(0.5 * h, s_max)
    uh, vh, th = axis_series(u0, spec, half)
    head.append((half, uh, vh, th))
    if half < s_max:
        u1, v1, t1 = _rk4(uh, vh, th, min(half, s_max - half), nm1, spec.lam)
        head.append((min(h, s_max), u1, v1, t1))
    rows = np.array(head)
    status = _SMAX
    if rows[-1, 0] < s_max:
        tail, status = _run(*rows[-1], h, s_max, nm1, spec.lam, True, False)
        rows = np.vstack([rows, tail[1:]])
    return _finish(rows, status, spec, h, planar=False)


def _finish(rows, status, spec, h, planar):
    finite = np.all(np.isfinite(rows), axis=1)
    rows = rows[finite]
    if status == _AXIS:
        s_hit, theta_hit = _locate_axis(rows, spec)
        term = Termination("AxisHit", float(s_hit), float(theta_hit))
    elif status == _NONFINITE:
        term = Termination("NonFinite", float(rows[-1, 0]))
    elif status == _PLANE:
        term = Termination("PlaneCross", float(rows[-1, 0]))
    else:
        term = Termination("ReachedSmax", float(rows[-1, 0]))
    return ProfilePath(spec, rows[:, 0].copy(), rows[:, 1].copy(), rows[:, 2].copy(),
                       rows[:, 3].copy(), h, term, planar=planar)


def integrate_from(state: ProfileState, spec: ExpanderSpec, s_max: float,
                   h_ode: float = 1e-3) -> ProfilePath:
    """Integrate from an off-axis state with uniform RK4 steps up to arclength s_max."""
    if spec.n < 2:
        raise InvalidDimension("use planar_curve for n = 1")
    if state.v <= V_AXIS_EPS:
        raise AxisSingularity("start state lies on the axis; use integrate_profile")
    if not (s_max > state.s and h_ode > 0):
        raise ValueError("need s_max > state.s and h_ode > 0")
    rows, status = _run(state.s, state.u, state.v, state.theta, float(h_ode), float(s_max),
                        float(spec.n - 1), spec.lam, True, False)
    return _finish(rows, status, spec, float(h_ode), planar=False)


def planar_curve(spec: ExpanderSpec, start=(0.0, 0.0), theta0: float = 0.0,
                 s_max: float = 10.0, h_ode: float = 1e-3) -> ProfilePath:
    """Expander curve in the plane through an arbitrary point and direction.

    Uses the n = 1 equation theta' = -lambda + (v cos(theta) - u sin(theta))/2.
    The v coordinate may take either sign here.
    """
    if spec.n != 1:
        raise InvalidDimension("planar curves need n = 1")
    if not (s_max > 0 and h_ode > 0):
        raise ValueError("s_max and h_ode must be positive")
    rows, status = _run(0.0, float(start[0]), float(start[1]), float(theta0), float(h_ode),
                        float(s_max), 0.0, spec.lam, False, False)
    return _finish(rows, status, spec, float(h_ode), planar=True)


# shooting


def _plane_defect(u0, spec, s_max, h):
    """Tangent angle at the first crossing of u = 0.

    Reflecting in u = 0 and reversing arclength, (u, v, theta)(s) -> (-u, v, -theta)(-s),
    maps solutions to solutions, so a profile that crosses u = 0 horizontally
    closes up symmetrically. The angle is
    not reduced mod 2 pi: crossings at theta = -2 pi k belong to profiles that wind
    before closing and are not counted.
    Returns (defect, v at the crossing), or (SENTINEL, nan) when no crossing occurs.
    """
    nm1 = float(spec.n - 1)
    half = 0.5 * h
    uh, vh, th = axis_series(u0, spec, half)
    u1, v1, t1 = _rk4(uh, vh, th, half, nm1, spec.lam)
    rows, status = _run(h, u1, v1, t1, h, s_max, nm1, spec.lam, True, True)
    if status != _PLANE or len(rows) < 2:
        return SENTINEL, math.nan
    (s0, ua, va, ta), (s1, ub, vb, tb) = rows[-2], rows[-1]
    _, _, da = _rhs(ua, va, ta, nm1, spec.lam)
    _, _, db = _rhs(ub, vb, tb, nm1, spec.lam)
    uf = lambda t: _hermite(s0, s1, ua, ub, math.cos(ta), math.cos(tb), t)
    s_c = _bisect(uf, s0, s1)
    theta_c = _hermite(s0, s1, ta, tb, da, db, s_c)
    v_c = _hermite(s0, s1, va, vb, math.sin(ta), math.sin(tb), s_c)
    return theta_c, v_c


def _worker_count() -> int:
    env = os.environ.get("EXPANDER_LAB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def shoot_closed(spec: ExpanderSpec, u0_range=(-10.0, -0.05), n_samples: int = 512,
                 s_max: float = 50.0, h_ode: float | None = None,
                 tol: float = 1e-8) -> ShootingResult:
    """Scan axis starts u0 for profiles that close into embedded spheres.

    Simple roots come from sign changes of the defect; a double root shows up
    as a local minimum of |defect| that reaches zero within tol.
    """
    lo, hi = map(float, u0_range)
    if not (lo < hi < 0):
        raise ValueError("u0_range must be an increasing interval in (-inf, 0)")
    if n_samples < 16:
        raise ValueError("need at least 16 samples")
    step = (lambda u: _default_step(u)) if h_ode is None else (lambda u: float(h_ode))

    def defect(u):
        return _plane_defect(u, spec, s_max, step(u))

    grid = np.linspace(lo, hi, n_samples)
    with ThreadPoolExecutor(_worker_count()) as pool:
        vals = list(pool.map(defect, grid))
    d = np.array([x[0] for x in vals])
    ok = np.abs(d) < SENTINEL

    found = []
    for i in range(n_samples - 1):
        a, b = d[i], d[i + 1]
        if not (ok[i] and ok[i + 1]):
            continue
        if a == 0.0:
            found.append(grid[i])
        elif a * b < 0:
            # a jump between crossing branches also changes sign; the final check drops it
            fa = lambda u: _checked(defect(u)[0])
            try:
                found.append(brentq(fa, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-15,
                                    maxiter=200))
            except _Escaped:
                continue
    for i in range(1, n_samples - 1):
        if not (ok[i - 1] and ok[i] and ok[i + 1]):
            continue
        if abs(d[i]) <= abs(d[i - 1]) and abs(d[i]) <= abs(d[i + 1]) \
                and d[i - 1] * d[i] > 0 and d[i] * d[i + 1] > 0:
            res = minimize_scalar(lambda u: abs(defect(u)[0]), bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options={"xatol": 1e-12})
            if res.fun <= tol:
                found.append(float(res.x))

    roots = []
    for u in sorted(found):
        dv, vc = defect(u)
        if abs(dv) > tol or any(abs(u - r[0]) < 1e-3 for r in roots):
            continue
        roots.append((float(u), float(vc)))
    angles = []
    for u, _ in roots:
        path = integrate_profile(u, spec, s_max, step(u))
        angles.append(path.closure_defect)
    samples = [(float(u), float(x)) for u, x in zip(grid, d)]
    return ShootingResult(spec.lam, spec.n, roots, samples, angles)


class _Escaped(Exception):
    pass


def _checked(value):
    if abs(value) >= SENTINEL:
        raise _Escaped
    return value


# revolution


class HermiteSpline:
    """Piecewise polynomial matching value and the first m derivatives at every knot.

    Each piece is stored in the scaled local variable x = (s - s_k)/(s_{k+1} - s_k),
    which keeps the coefficients well conditioned on short intervals.
    """

    def __init__(self, knots, derivs):
        knots = np.asarray(knots, dtype=float)
        derivs = np.asarray(derivs, dtype=float)          # (len(knots), m+1)
        m = derivs.shape[1] - 1
        deg = 2 * m + 1
        dx = np.diff(knots)
        scale = dx[:, None] ** np.arange(m + 1)
        fact = np.array([math.factorial(j) for j in range(deg + 1)], dtype=float)
        left = derivs[:-1] * scale / fact[: m + 1]
        right = derivs[1:] * scale
        # p^(i)(1) = sum_j b_j j!/(j-i)!; split into known (j <= m) and unknown parts
        def falling(j, i):
            return fact[j] / fact[j - i] if j >= i else 0.0
        known = np.array([[falling(j, i) for j in range(m + 1)] for i in range(m + 1)])
        unknown = np.array([[falling(j, i) for j in range(m + 1, deg + 1)] for i in range(m + 1)])
        rhs = right - left @ known.T
        coef = np.linalg.solve(unknown, rhs.T).T
        self.knots = knots
        self.dx = dx
        self.coef = np.concatenate([left, coef], axis=1)  # (pieces, deg+1)

    def __call__(self, s, nu: int = 0):
        s = np.asarray(s, dtype=float)
        k = np.clip(np.searchsorted(self.knots, s, side="right") - 1, 0, len(self.dx) - 1)
        x = (s - self.knots[k]) / self.dx[k]
        c = self.coef[k]
        deg = c.shape[-1] - 1
        out = np.zeros_like(x)
        for j in range(deg, nu - 1, -1):
            w = math.factorial(j) / math.factorial(j - nu)
            out = out * x + w * c[..., j]
        return out / self.dx[k] ** nu



@dataclass
class RevolvedSurface:
    """Hypersurface swept by a profile; jets come from the interpolating splines."""
    path: ProfilePath
    n: int
    patch: ImmersedPatch
    closed: bool
    _u: HermiteSpline = field(repr=False, default=None)
    _v: HermiteSpline = field(repr=False, default=None)
    _theta: HermiteSpline = field(repr=False, default=None)

    @property
    def spec(self) -> ExpanderSpec:
        return ExpanderSpec(self.n, self.path.spec.lam)

    @property
    def lam(self) -> float:
        return self.path.spec.lam

    @property
    def orientation(self) -> int:
        return 1

    @property
    def s_span(self) -> tuple:
        return float(self.path.s[0]), float(self.path.s[-1])

    def profile(self, s, nu: int = 0):
        s = np.asarray(s, dtype=float)
        return self._u(s, nu), self._v(s, nu)

    def with_domain(self, domain) -> "RevolvedSurface":
        return replace(self, patch=replace(self.patch, domain=tuple(map(tuple, domain))))

    def closed_form_field(self, pts) -> JetField:
        """Jets from the interpolated (u, v, theta) and theta' without differencing.

        Profile curvature theta', orbit curvature -cos(theta)/v (multiplicity n-1).
        """
        pts = np.asarray(pts, dtype=float)
        s = pts[..., 0]
        u, v = self.profile(s)
        th, k_profile = self._theta(s), self._theta(s, 1)
        c, sn = np.cos(th), np.sin(th)
        m = self.n - 1
        if m == 0:
            x = np.stack([u, v], axis=-1)
            nu = np.stack([-sn, c], axis=-1)
            T = np.stack([c, sn], axis=-1)[..., None, :]
            return assemble_jets(x, nu, T, k_profile[..., None, None],
                                 principal=k_profile[..., None])
        ang = pts[..., 1:]
        w = sphere_map(ang)
        x = np.concatenate([u[..., None], v[..., None] * w], axis=-1)
        nu = np.concatenate([-sn[..., None], c[..., None] * w], axis=-1)
        dw = complex_step_tangents(sphere_map, ang)                 # (..., m, n)
        Ts = np.concatenate([c[..., None], sn[..., None] * w], axis=-1)
        Ta = np.concatenate([np.zeros(dw.shape[:-1] + (1,)), v[..., None, None] * dw], axis=-1)
        T = np.concatenate([Ts[..., None, :], Ta], axis=-2)
        k_orbit = -c / v
        h2 = np.zeros(pts.shape[:-1] + (self.n, self.n))
        h2[..., 0, 0] = k_profile
        h2[..., 1:, 1:] = (k_orbit * v * v)[..., None, None] * np.einsum(
            "...ik,...jk->...ij", dw, dw)
        principal = np.sort(np.concatenate(
            [k_profile[..., None], np.repeat(k_orbit[..., None], m, axis=-1)], axis=-1), axis=-1)
        return assemble_jets(x, nu, T, h2, principal=principal)

    def closed_form_grid(self, grid: ParamGrid) -> JetField:
        jets = self.closed_form_field(grid.points)
        jets.grid = grid
        return jets

    def closed_form_jet(self, p):
        return self.closed_form_field(np.asarray(p, dtype=float)[None, :]).at((0,))


def revolve(path: ProfilePath, n: int | None = None, s_range=None,
            resolution: float = 1e-2) -> RevolvedSurface:
    """Sweep a profile around the u axis (n = 1 keeps the planar curve).

    u and v are interpolated by degree-7 Hermite splines and theta by a quintic
    one, all using derivative values from the ODE at each sample. The default patch domain skips the
    stretches within 2% of the maximal orbit radius from the axis.
    """
    n = path.spec.n if n is None else int(n)
    if n < 1:
        raise InvalidDimension("n must be >= 1")
    s, u, v, th = path.s, path.u, path.v, path.theta
    interior = v[1:-1] > 0 if n > 1 else np.ones(len(s) - 2, dtype=bool)
    if len(s) < 8 or interior.sum() < 8:
        raise DegeneratePath("need at least 8 samples off the axis")
    if n > 1 and np.any(v[1:-1] <= 0):
        raise DegeneratePath("profile touches the axis in its interior")
    if np.any(np.diff(s) <= 0):
        raise DegeneratePath("arclength must increase strictly")
    spec = ExpanderSpec(n, path.spec.lam)
    dth = _theta_prime(s, u, v, th, spec, planar=(n == 1))
    ddth = _theta_second(u, v, th, dth, spec, planar=(n == 1))
    c, sn = np.cos(th), np.sin(th)
    U = HermiteSpline(
        s, np.stack([u, c, -sn * dth, -c * dth ** 2 - sn * ddth], axis=-1))
    V = HermiteSpline(
        s, np.stack([v, sn, c * dth, -sn * dth ** 2 + c * ddth], axis=-1))
    Th = HermiteSpline(s, np.stack([th, dth, ddth], axis=-1))

    if s_range is None:
        if n > 1:
            far = np.nonzero(v >= 0.02 * v.max())[0]
            s_range = (s[far[0]], s[far[-1]])
        else:
            s_range = (s[0], s[-1])
    s_range = (float(s_range[0]), float(s_range[1]))
    m = n - 1

    def emb(p):
        ss = p[..., 0]
        if m == 0:
            return np.stack([U(ss), V(ss)], axis=-1)
        w = sphere_map(p[..., 1:])
        return np.concatenate([U(ss)[..., None], V(ss)[..., None] * w], axis=-1)

    def normal(p):
        ss = p[..., 0]
        du, dv = U(ss, 1), V(ss, 1)
        sp = np.hypot(du, dv)
        w = sphere_map(p[..., 1:])
        return np.concatenate([(-dv / sp)[..., None], (du / sp)[..., None] * w], axis=-1)

    domain = tuple([s_range] + (_angle_domain(m) if m else []))
    # for n = 2 the cross product of (d/ds, d/dphi) is the negative of the profile normal
    orientation = -1 if n == 2 else 1
    patch = ImmersedPatch(n, domain, emb, resolution, orientation=orientation,
                          normal_fn=normal if n > 2 else None, label="revolved profile")
    closed = (n > 1 and v[0] == 0.0 and path.terminated_by.kind == "AxisHit"
              and abs(path.closure_defect) <= 1e-6)
    return RevolvedSurface(path, n, patch, closed, U, V, Th)

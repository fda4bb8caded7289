"""Hyperplanes, round spheres and round cylinders that solve the expander equation exactly."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidDimension, NonPositiveRadius
from .geometry import (ExpanderSpec, ImmersedPatch, JetField, ParamGrid,
                       assemble_jets, fd_jet_field)


def sphere_map(angles):
    """Point of the unit m-sphere from m hyperspherical angles (last one azimuthal).

    Accepts complex input so tangents can be taken by complex step.
    """
    m = angles.shape[-1]
    coords = []
    prod = 1.0
    for i in range(m - 1):
        coords.append(prod * np.cos(angles[..., i]))
        prod = prod * np.sin(angles[..., i])
    coords.append(prod * np.cos(angles[..., m - 1]))
    coords.append(prod * np.sin(angles[..., m - 1]))
    return np.stack(np.broadcast_arrays(*coords), axis=-1)


def _angle_domain(m):
    # polar angles kept away from the coordinate poles
    return [(math.pi / 4, 3 * math.pi / 4)] * (m - 1) + [(0.0, math.pi)]


def complex_step_tangents(embedding, pts, eps=1e-20):
    pts = np.asarray(pts, dtype=float)
    out = []
    for i in range(pts.shape[-1]):
        q = pts.astype(complex)
        q[..., i] += 1j * eps
        out.append(np.imag(embedding(q)) / eps)
    return np.stack(out, axis=-2)


@dataclass(frozen=True)
class CanonicalSurface:
    kind: str                 # "hyperplane", "sphere" or "cylinder"
    n: int
    k: int                    # dimension of the round factor (0 for hyperplanes)
    lam: float
    patch: ImmersedPatch
    r: float | None = None
    d: float | None = None
    sign: int = 1
    L: float = 10.0           # half-width of the truncated flat factor

    @property
    def spec(self) -> ExpanderSpec:
        return ExpanderSpec(self.n, self.lam)

    @property
    def closed(self) -> bool:
        return self.kind == "sphere"

    @property
    def orientation(self) -> int:
        return self.patch.orientation

    def exact_principal(self) -> np.ndarray:
        if self.kind == "hyperplane":
            vals = np.zeros(self.n)
        else:
            vals = np.array([-1.0 / self.r] * self.k + [0.0] * (self.n - self.k))
        return np.sort(self.orientation * vals)

    def with_domain(self, domain) -> "CanonicalSurface":
        return replace(self, patch=replace(self.patch, domain=tuple(map(tuple, domain))))

    def flipped(self) -> "CanonicalSurface":
        return replace(self, patch=self.patch.flipped(), lam=-self.lam, sign=-self.sign)

    def charts(self) -> list:
        """Patches covering the example; spheres get a second chart rotated over the poles."""
        if self.kind != "sphere":
            return [self.patch]
        emb = self.patch.embedding
        rotated = replace(self.patch, embedding=lambda p: np.roll(emb(p), 1, axis=-1),
                          normal_fn=None if self.patch.normal_fn is None
                          else (lambda p: np.roll(self.patch.normal_fn(p), 1, axis=-1)),
                          label=self.patch.label + " (rotated chart)")
        return [self.patch, rotated]

    def _normal_and_form(self, pts, T):
        # every constructor parametrizes so that orientation +1 is the outward (or +e_last) normal
        o = self.orientation
        x = np.asarray(self.patch.embedding(pts), dtype=float)
        if self.kind == "hyperplane":
            nu = np.zeros_like(x)
            nu[..., -1] = 1.0
            h2 = np.zeros(T.shape[:-2] + (self.n, self.n))
        elif self.kind == "sphere":
            nu = x / self.r
            h2 = -np.einsum("...ik,...jk->...ij", T, T) / self.r
        else:
            nu = np.zeros_like(x)
            nu[..., : self.k + 1] = x[..., : self.k + 1] / self.r
            Ts = T[..., : self.k + 1]
            h2 = -np.einsum("...ik,...jk->...ij", Ts, Ts) / self.r
        return x, o * nu, o * h2

    def closed_form_field(self, pts) -> JetField:
        """Exact jets at an array of parameter points (no finite differences)."""
        pts = np.asarray(pts, dtype=float)
        T = complex_step_tangents(self.patch.embedding, pts)
        x, nu, h2 = self._normal_and_form(pts, T)
        principal = np.broadcast_to(self.exact_principal(), pts.shape[:-1] + (self.n,))
        return assemble_jets(x, nu, T, h2, principal=principal)

    def closed_form_grid(self, grid: ParamGrid) -> JetField:
        jets = self.closed_form_field(grid.points)
        jets.grid = grid
        return jets

    def closed_form_jet(self, p):
        return self.closed_form_field(np.asarray(p, dtype=float)[None, :]).at((0,))

    def fd_field(self, grid: ParamGrid) -> JetField:
        return fd_jet_field(self.patch, grid)


def make_hyperplane(n: int, d: float = 0.0, sign: int = 1, L: float = 10.0,
                    resolution: float = 1e-2) -> CanonicalSurface:
    """The hyperplane x_{n+1} = d with normal sign*e_{n+1}; lambda = sign*d/2."""
    if int(n) != n or n < 1:
        raise InvalidDimension(f"n must be >= 1, got {n}")
    if d < 0:
        raise ValueError("distance d must be non-negative")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")

    def emb(p):
        tail = np.full(p.shape[:-1] + (1,), d, dtype=p.dtype)
        return np.concatenate([p, tail], axis=-1)

    def up(p):
        nu = np.zeros(p.shape[:-1] + (n + 1,))
        nu[..., -1] = 1.0
        return nu

    patch = ImmersedPatch(n, tuple([(-L, L)] * n), emb, resolution,
                          normal_fn=up if n > 2 else None, label=f"hyperplane d={d}")
    patch = replace(patch, orientation=sign)
    return CanonicalSurface("hyperplane", n, 0, sign * d / 2.0, patch, d=d, sign=sign, L=L)


def make_sphere(n: int, r: float, resolution: float = 1e-2) -> CanonicalSurface:
    """Round sphere of radius r about the origin with outward normal; lambda = n/r + r/2."""
    if int(n) != n or n < 1:
        raise InvalidDimension(f"n must be >= 1, got {n}")
    if not r > 0:
        raise NonPositiveRadius(f"radius must be positive, got {r}")

    def emb(p):
        # the circle runs clockwise so the rotated tangent points outward
        return r * sphere_map(-p if n == 1 else p)

    def out(p):
        return sphere_map(-p if n == 1 else p)

    patch = ImmersedPatch(n, tuple(_angle_domain(n)), emb, resolution,
                          normal_fn=out if n > 2 else None, label=f"sphere r={r}")
    return CanonicalSurface("sphere", n, n, n / r + r / 2.0, patch, r=r)


def make_cylinder(k: int, n: int, r: float, L: float = 10.0,
                  resolution: float = 1e-2) -> CanonicalSurface:
    """S^k_r x R^(n-k) with outward normal on the round factor; lambda = k/r + r/2."""
    if int(n) != n or int(k) != k or not 1 <= k <= n - 1:
        raise InvalidDimension(f"need 1 <= k <= n-1, got k={k}, n={n}")
    if not r > 0:
        raise NonPositiveRadius(f"radius must be positive, got {r}")

    def emb(p):
        return np.concatenate([r * sphere_map(p[..., :k]), p[..., k:]], axis=-1)

    def out(p):
        return np.concatenate([sphere_map(p[..., :k]), np.zeros(p.shape[:-1] + (n - k,))],
                              axis=-1)

    domain = tuple(_angle_domain(k) + [(-L, L)] * (n - k))
    patch = ImmersedPatch(n, domain, emb, resolution,
                          normal_fn=out if n > 2 else None, label=f"cylinder k={k} r={r}")
    return CanonicalSurface("cylinder", n, k, k / r + r / 2.0, patch, r=r, L=L)


def radii_for_lambda(k: int, lam: float) -> list:
    """Radii r with k/r + r/2 = lam, sorted ascending."""
    if k < 1:
        raise InvalidDimension("k must be >= 1")
    crit = math.sqrt(2 * k)
    if abs(lam - crit) <= 1e-12:
        return [crit]
    if lam < crit:
        return []
    root = math.sqrt(lam * lam - 2 * k)
    big = lam + root
    # small root from the product of roots, avoiding cancellation
    return [2 * k / big, big]

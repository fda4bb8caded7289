"""Extrinsic and intrinsic geometry of parametrized hypersurface patches.

Sign convention used throughout the package: A(X) = -D_X n and H = -tr A,
so a round sphere with outward normal has H = n/r and principal curvatures -1/r.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidDimension, NonFinite, SingularMetric


@dataclass(frozen=True)
class ExpanderSpec:
    """Intrinsic dimension n and the constant lambda in H + <x, n>/2 = lambda."""
    n: int
    lam: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidDimension(f"n must be a positive integer, got {self.n}")


@dataclass(frozen=True)
class ParamGrid:
    axes: tuple

    @classmethod
    def over(cls, domain, h: float, min_points: int = 5) -> "ParamGrid":
        # spacing is adjusted so the grid spans each interval exactly
        axes = []
        for lo, hi in domain:
            count = max(min_points, int(round((hi - lo) / h)) + 1)
            axes.append(np.linspace(lo, hi, count))
        return cls(tuple(axes))

    @property
    def spacing(self) -> tuple:
        return tuple(float(a[1] - a[0]) for a in self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(len(a) for a in self.axes)

    @property
    def points(self) -> np.ndarray:
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def interior_mask(self, margin: float) -> np.ndarray:
        """Points at parameter distance >= margin from every face of the box."""
        masks = []
        for a in self.axes:
            tol = 1e-9 * (a[-1] - a[0])
            masks.append((a - a[0] >= margin - tol) & (a[-1] - a >= margin - tol))
        out = masks[0]
        for m in masks[1:]:
            out = np.logical_and.outer(out, m)
        return out


@dataclass(frozen=True)
class ImmersedPatch:
    """Parametric immersion of a box in R^n into R^(n+1).

    The embedding maps an array of parameter points (..., n) to (..., n+1).
    For n >= 3 a closed-form unit normal must be supplied as normal_fn.
    """
    intrinsic_dim: int
    domain: tuple
    embedding: Callable[[np.ndarray], np.ndarray]
    resolution: float = 1e-2
    orientation: int = 1
    normal_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""

    def __post_init__(self):
        if self.intrinsic_dim < 1 or len(self.domain) != self.intrinsic_dim:
            raise InvalidDimension("domain must have one interval per intrinsic dimension")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.intrinsic_dim > 2 and self.normal_fn is None:
            raise InvalidDimension("patches with n >= 3 need a closed-form normal")

    @property
    def ambient_dim(self) -> int:
        return self.intrinsic_dim + 1

    def grid(self, h: float | None = None) -> ParamGrid:
        return ParamGrid.over(self.domain, self.resolution if h is None else h)

    def flipped(self) -> "ImmersedPatch":
        return replace(self, orientation=-self.orientation)


@dataclass
class GeomJet:
    x: np.ndarray
    normal: np.ndarray
    tangent_basis: np.ndarray
    metric: np.ndarray
    shape_operator: np.ndarray
    principal_curvatures: np.ndarray
    H: float
    normA2: float
    trA3: float
    x_tan: np.ndarray
    normXtan2: float
    A_xt_xt: float

    @property
    def x_dot_n(self) -> float:
        return float(self.x @ self.normal)


@dataclass
class JetField:
    """Geometric data sampled on a parameter grid; leading axes are grid axes."""
    x: np.ndarray
    normal: np.ndarray
    tangents: np.ndarray      # (..., n, n+1)
    metric: np.ndarray        # (..., n, n)
    second_form: np.ndarray   # h_ij = <F_ij, normal>
    shape_operator: np.ndarray
    principal: np.ndarray
    H: np.ndarray
    normA2: np.ndarray
    trA3: np.ndarray
    x_tan: np.ndarray
    normXtan2: np.ndarray
    A_xt_xt: np.ndarray
    grid: ParamGrid | None = None

    @property
    def x_dot_n(self) -> np.ndarray:
        return np.einsum("...k,...k->...", self.x, self.normal)

    def at(self, index) -> GeomJet:
        index = tuple(index)
        return GeomJet(
            x=self.x[index], normal=self.normal[index],
            tangent_basis=self.tangents[index], metric=self.metric[index],
            shape_operator=self.shape_operator[index],
            principal_curvatures=self.principal[index],
            H=float(self.H[index]), normA2=float(self.normA2[index]),
            trA3=float(self.trA3[index]), x_tan=self.x_tan[index],
            normXtan2=float(self.normXtan2[index]), A_xt_xt=float(self.A_xt_xt[index]),
        )


def assemble_jets(x, normal, tangents, second_form, principal=None, grid=None) -> JetField:
    """Build a JetField from position, unit normal, tangents and second fundamental form.

    principal may be passed when exact principal curvatures are known.
    """
    g = np.einsum("...ik,...jk->...ij", tangents, tangents)
    ginv = np.linalg.inv(g)
    A = ginv @ second_form
    if principal is None:
        # eigenvalues of A via the symmetric form L^-1 h L^-T
        L = np.linalg.cholesky(g)
        Linv = np.linalg.inv(L)
        M = Linv @ second_form @ np.swapaxes(Linv, -1, -2)
        M = 0.5 * (M + np.swapaxes(M, -1, -2))
        principal = np.linalg.eigvalsh(M)
    principal = np.asarray(principal, dtype=float)
    H = -principal.sum(axis=-1)
    normA2 = (principal ** 2).sum(axis=-1)
    trA3 = (principal ** 3).sum(axis=-1)
    xn = np.einsum("...k,...k->...", x, normal)
    x_tan = x - xn[..., None] * normal
    b = np.einsum("...jk,...k->...j", tangents, x)
    c = np.einsum("...ij,...j->...i", ginv, b)
    A_xt_xt = np.einsum("...i,...ij,...j->...", c, second_form, c)
    return JetField(
        x=x, normal=normal, tangents=tangents, metric=g, second_form=second_form,
        shape_operator=A, principal=principal, H=H, normA2=normA2, trA3=trA3,
        x_tan=x_tan, normXtan2=np.einsum("...k,...k->...", x_tan, x_tan),
        A_xt_xt=A_xt_xt, grid=grid,
    )


def flip_jets(jets: JetField) -> JetField:
    """Jets of the same patch with the opposite normal."""
    return assemble_jets(jets.x, -jets.normal, jets.tangents, -jets.second_form,
                         principal=-jets.principal[..., ::-1], grid=jets.grid)


def _diff(arr, spacing, axis):
    return np.gradient(arr, spacing, axis=axis, edge_order=2)


def _tangent_normal(tangents, normal_fn, points, orientation):
    n = tangents.shape[-2]
    if normal_fn is not None:
        nu = normal_fn(points)
    elif n == 1:
        t = tangents[..., 0, :]
        nu = np.stack([-t[..., 1], t[..., 0]], axis=-1)
    elif n == 2:
        nu = np.cross(tangents[..., 0, :], tangents[..., 1, :])
    else:
        raise InvalidDimension("normal for n >= 3 needs normal_fn")
    nu = nu / np.linalg.norm(nu, axis=-1, keepdims=True)
    return orientation * nu


def _check_metric(tangents):
    g = np.einsum("...ik,...jk->...ij", tangents, tangents)
    n = g.shape[-1]
    scale = np.max(np.trace(g, axis1=-2, axis2=-1)) / n
    det = np.linalg.det(g)
    if np.any(det < 1e-12 * scale ** n):
        raise SingularMetric(f"metric determinant {det.min():.3e} below threshold")


def fd_jet_field(patch: ImmersedPatch, grid: ParamGrid) -> JetField:
    """Jets from second-order finite differences of the embedding on a grid.

    The second fundamental form is taken from differences of the unit normal,
    h_ij = -(<N_i, F_j> + <N_j, F_i>)/2, which keeps one level of differencing
    per factor.
    """
    pts = grid.points
    X = np.asarray(patch.embedding(pts), dtype=float)
    if not np.all(np.isfinite(X)):
        raise NonFinite("embedding produced non-finite values")
    n = patch.intrinsic_dim
    T = np.stack([_diff(X, dx, i) for i, dx in enumerate(grid.spacing)], axis=-2)
    if not np.all(np.isfinite(T)):
        raise NonFinite("non-finite tangent vectors")
    _check_metric(T)
    N = _tangent_normal(T, patch.normal_fn, pts, patch.orientation)
    dN = np.stack([_diff(N, dx, i) for i, dx in enumerate(grid.spacing)], axis=-2)
    if not np.all(np.isfinite(dN)):
        raise NonFinite("non-finite normal derivatives")
    cross = np.einsum("...ik,...jk->...ij", dN, T)
    h2 = -0.5 * (cross + np.swapaxes(cross, -1, -2))
    assert h2.shape[-1] == n
    return assemble_jets(X, N, T, h2, grid=grid)


def _local_grid(patch: ImmersedPatch, p, h: float):
    """Five-point lattice through p on each axis, shifted inward at the boundary."""
    axes, index = [], []
    for (lo, hi), c in zip(patch.domain, p):
        if hi - lo < 4 * h * (1 - 1e-12):
            raise ValueError("domain too small for a five-point stencil")
        k_lo = -2
        while c + k_lo * h < lo - 1e-12 * max(1.0, abs(lo)):
            k_lo += 1
        while c + (k_lo + 4) * h > hi + 1e-12 * max(1.0, abs(hi)):
            k_lo -= 1
        axes.append(c + h * np.arange(k_lo, k_lo + 5))
        index.append(-k_lo)
    return ParamGrid(tuple(axes)), tuple(index)


def evaluate_jet(patch: ImmersedPatch, p: Sequence[float], h: float | None = None) -> GeomJet:
    """Finite-difference jet at a single parameter point."""
    h = patch.resolution if h is None else h
    if h <= 0:
        raise ValueError("h must be positive")
    grid, idx = _local_grid(patch, np.asarray(p, dtype=float), h)
    return fd_jet_field(patch, grid).at(idx)


def expander_residual(jet, spec: ExpanderSpec):
    """H + <x, n>/2 - lambda; works on a GeomJet or a JetField."""
    return jet.H + 0.5 * jet.x_dot_n - spec.lam


class GridGeometry:
    """Metric quantities and second-order differential operators on a grid."""

    def __init__(self, patch: ImmersedPatch, grid: ParamGrid):
        self.patch = patch
        self.grid = grid
        self.x = np.asarray(patch.embedding(grid.points), dtype=float)
        self.tangents = np.stack(
            [_diff(self.x, dx, i) for i, dx in enumerate(grid.spacing)], axis=-2)
        if not np.all(np.isfinite(self.tangents)):
            raise NonFinite("non-finite tangent vectors")
        _check_metric(self.tangents)
        g = np.einsum("...ik,...jk->...ij", self.tangents, self.tangents)
        self.ginv = np.linalg.inv(g)
        self.sqrtg = np.sqrt(np.linalg.det(g))

    def _partials(self, f):
        return np.stack([_diff(f, dx, i) for i, dx in enumerate(self.grid.spacing)], axis=-1)

    def gradient(self, f) -> np.ndarray:
        """Ambient components of grad f = g^ij d_i f F_j."""
        coeff = np.einsum("...ij,...j->...i", self.ginv, self._partials(f))
        return np.einsum("...i,...ik->...k", coeff, self.tangents)

    def x_dot_grad(self, f) -> np.ndarray:
        return np.einsum("...k,...k->...", self.x, self.gradient(f))

    def laplacian(self, f) -> np.ndarray:
        coeff = np.einsum("...ij,...j->...i", self.ginv, self._partials(f))
        flux = self.sqrtg[..., None] * coeff
        div = sum(_diff(flux[..., i], dx, i) for i, dx in enumerate(self.grid.spacing))
        out = div / self.sqrtg
        if not np.all(np.isfinite(out)):
            raise NonFinite("non-finite Laplacian")
        return out

    def drifted(self, f, alpha: float = -1.0) -> np.ndarray:
        """Delta f - (alpha/2) <x, grad f>; alpha = -1 is the operator Delta + <x, grad .>/2."""
        return self.laplacian(f) - 0.5 * alpha * self.x_dot_grad(f)


def _field_on_grid(patch, field):
    grid = patch.grid()
    field = np.asarray(field, dtype=float)
    if field.shape != grid.shape:
        raise ValueError(f"field shape {field.shape} does not match grid {grid.shape}")
    return grid, field


def surface_gradient(patch: ImmersedPatch, field, p) -> np.ndarray:
    """Gradient of a grid field at grid index p, in ambient coordinates."""
    grid, field = _field_on_grid(patch, field)
    return GridGeometry(patch, grid).gradient(field)[tuple(p)]


def laplace_beltrami(patch: ImmersedPatch, field, p) -> float:
    """Divergence-form Laplace-Beltrami of a grid field at grid index p."""
    grid, field = _field_on_grid(patch, field)
    return float(GridGeometry(patch, grid).laplacian(field)[tuple(p)])

"""Rigidity hypotheses as pointwise predicates over sampled jets.

Every checker returns a ConditionReport whose worst_value is a signed margin:
non-negative means the hypothesis holds at every sample.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .canonical import CanonicalSurface
from .errors import (AlphaTooSmall, CurvatureGrowthTooLarge, LambdaBelowGap, LambdaZero,
                     NotClosed, NotCMC)
from .geometry import ExpanderSpec, ImmersedPatch, JetField, ParamGrid, fd_jet_field
from .profile import RevolvedSurface

TOL = 1e-10


@dataclass
class ConditionReport:
    condition_name: str
    holds_everywhere: bool
    worst_point: list
    worst_value: float
    n_points: int
    spec: ExpanderSpec
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"condition": self.condition_name, "holds": bool(self.holds_everywhere),
                "worst_value": float(self.worst_value),
                "worst_point": [float(c) for c in self.worst_point],
                "n_points": int(self.n_points), "lambda": self.spec.lam,
                "details": {k: _plain(v) for k, v in self.details.items()}}


def _plain(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


def eigen_identity(eigs) -> tuple:
    """Both sides of H trA^3 + |A|^4 = -sum_{i<j} k_i k_j (k_i - k_j)^2."""
    k = np.asarray(eigs, dtype=float)
    lhs = -k.sum() * (k ** 3).sum() + (k ** 2).sum() ** 2
    rhs = -sum(a * b * (a - b) ** 2 for a, b in itertools.combinations(k, 2))
    return float(lhs), float(rhs)


@dataclass
class Samples:
    jets: JetField
    points: np.ndarray        # parameter point of every sample, (N, n)
    grid: ParamGrid | None
    spec: ExpanderSpec

    def flat(self, arr):
        return np.asarray(arr).reshape(-1)


def sample(surface, spec: ExpanderSpec | None = None, per_axis: int = 41) -> Samples:
    """Closed-form jets on a lattice over the surface's patch (FD jets for bare patches)."""
    if isinstance(surface, Samples):
        return surface
    if isinstance(surface, JetField):
        if spec is None:
            raise ValueError("a bare JetField needs an ExpanderSpec")
        pts = np.indices(np.shape(surface.H)).reshape(len(np.shape(surface.H)), -1).T
        return Samples(surface, pts.astype(float), surface.grid, spec)
    patch = surface if isinstance(surface, ImmersedPatch) else surface.patch
    grid = ParamGrid(tuple(np.linspace(lo, hi, per_axis) for lo, hi in patch.domain))
    if isinstance(surface, ImmersedPatch):
        jets = fd_jet_field(surface, grid)
    else:
        jets = surface.closed_form_grid(grid)
    if spec is None:
        spec = surface.spec
    return Samples(jets, grid.points.reshape(-1, patch.intrinsic_dim), grid, spec)


def _report(name, margin, S: Samples, details=None, tol=TOL, mask=None) -> ConditionReport:
    m = np.asarray(margin, dtype=float).reshape(-1)
    if mask is not None:
        keep = np.asarray(mask).reshape(-1)
        idx_all = np.nonzero(keep)[0]
        m = m[keep]
    else:
        idx_all = np.arange(m.size)
    if m.size == 0:
        return ConditionReport(name, False, [], -math.inf, 0, S.spec, details or {})
    i = int(np.argmin(m))
    worst = float(m[i])
    return ConditionReport(name, worst >= -tol, list(S.points[idx_all[i]]), worst, int(m.size),
                           S.spec, details or {})


def _spec_of(surface, spec):
    return surface.spec if spec is None else spec


def check_gap_lambda(surface) -> ConditionReport:
    """lambda - sqrt(2n) on a closed example."""
    if not getattr(surface, "closed", False):
        raise NotClosed("the lambda gap applies to closed surfaces only")
    spec = surface.spec
    margin = spec.lam - math.sqrt(2 * spec.n)
    return ConditionReport("gap_lambda", margin >= -TOL, [], margin, 1, spec)


def check_pinching(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """|A|^2 <= -1/2 + lambda (lambda - sqrt(lambda^2 - 2n)) / (2n) at every sample."""
    spec = _spec_of(surface, spec)
    n, lam = spec.n, spec.lam
    disc = lam * lam - 2 * n
    if lam < math.sqrt(2 * n) - 1e-12:
        raise LambdaBelowGap(f"lambda = {lam} is below sqrt(2n) = {math.sqrt(2 * n)}")
    root = math.sqrt(max(disc, 0.0))
    bound = -0.5 + lam * (lam - root) / (2 * n)
    S = sample(surface, spec)
    return _report("pinching", bound - S.jets.normA2, S,
                   {"bound": bound, "predicted_radius": lam + root})


def check_mean_convex_condition(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """H >= 0 and H trA^3 + |A|^4 <= 0."""
    S = sample(surface, spec)
    J = S.jets
    m_H = np.asarray(J.H)
    m_q = -(J.H * J.trA3 + J.normA2 ** 2)
    rep = _report("mean_convex", np.minimum(m_H, m_q), S,
                  {"min_H": float(m_H.min()), "min_quartic": float(m_q.min())})
    return rep


def check_sphere_condition(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """lambda^2 >= 2n + (lambda - 2H)^2."""
    S = sample(surface, spec)
    n, lam = S.spec.n, S.spec.lam
    return _report("sphere_condition", lam ** 2 - 2 * n - (lam - 2 * S.jets.H) ** 2, S)


def _diag_radii(S: Samples):
    r = np.sqrt(np.einsum("...k,...k->...", S.jets.x, S.jets.x))
    top = max(float(r.max()), 1.0)
    return np.array([top / 4, top / 2, top])


def check_huiss_condition(surface, spec: ExpanderSpec | None = None,
                          radii=None) -> ConditionReport:
    """lambda((H - lambda) trA^3 - |A|^2/2) >= 0 together with H - lambda <= 0.

    Also reports the truncated integral of |A|^2 exp(|x|^2/4) for a few radii;
    finiteness over the whole surface is not decidable from samples.
    """
    S = sample(surface, spec)
    J, lam = S.jets, S.spec.lam
    m1 = lam * ((J.H - lam) * J.trA3 - J.normA2 / 2)
    m2 = lam - J.H
    details = {"min_product": float(np.min(m1)), "min_lambda_minus_H": float(np.min(m2))}
    if isinstance(surface, (CanonicalSurface, RevolvedSurface)):
        from .measure import weighted_integral
        radii = _diag_radii(S) if radii is None else np.asarray(radii, dtype=float)
        details["radii"] = [float(r) for r in radii]
        details["truncated_integral"] = [weighted_integral(surface, "normA2", -1.0, r)
                                         for r in radii]
    return _report("huisken_type", np.minimum(m1, m2), S, details)


def check_tu_condition(surface, spec: ExpanderSpec | None = None,
                       alpha: float = 1.0) -> ConditionReport:
    """|A|^2 (H - lambda) H + H^2/2 (1 + (alpha+1)^2/8 |x^T|^2) <= 0."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    S = sample(surface, spec)
    J, lam = S.jets, S.spec.lam
    lhs = J.normA2 * (J.H - lam) * J.H + 0.5 * J.H ** 2 * (1 + (alpha + 1) ** 2 / 8 * J.normXtan2)
    return _report("drifted_alpha_H_sign", -lhs, S, {"alpha": alpha})


def _weak_local_max(field: np.ndarray) -> bool:
    """Some interior grid point is >= all of its neighbours (diagonals included)."""
    if field.ndim == 0 or min(field.shape) < 3:
        return False
    core = tuple(slice(1, -1) for _ in field.shape)
    centre = field[core]
    ok = np.ones(centre.shape, dtype=bool)
    for offs in itertools.product((-1, 0, 1), repeat=field.ndim):
        if not any(offs):
            continue
        sl = tuple(slice(1 + o, field.shape[i] - 1 + o) for i, o in enumerate(offs))
        ok &= centre >= field[sl] - 1e-12 * np.maximum(1.0, np.abs(centre))
    ok &= np.isfinite(centre)
    return bool(ok.any())


def check_smoczyk_conditions(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """Nonempty {H != lambda}, the scaled condition on it, and a local maximum of |A|^2/(H-lambda)^2."""
    S = sample(surface, spec)
    lam = S.spec.lam
    if lam == 0:
        raise LambdaZero("the condition divides by lambda")
    J = S.jets
    diff = J.H - lam
    off = np.abs(diff) > 1e-10
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = -(lam / diff) * (diff * J.trA3 - J.normA2 / 2)
        ratio = np.where(off, J.normA2 / diff ** 2, np.nan)
    has_max = _weak_local_max(ratio) if S.grid is not None else False
    details = {"nonempty": bool(off.any()), "ratio_local_max": has_max}
    return _report("smoczyk_type", margin, S, details, mask=off)


def check_cmc_identity(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """-H/2 - |A|^2 (H - lambda) = 0 on a constant mean curvature expander.

    worst_value is minus the largest absolute residual.
    """
    S = sample(surface, spec)
    J, lam = S.jets, S.spec.lam
    if float(np.ptp(J.H)) > 1e-10:
        raise NotCMC(f"H varies by {float(np.ptp(J.H)):.3e}")
    res = np.abs(-J.H / 2 - J.normA2 * (J.H - lam))
    rep = _report("cmc_identity", -res, S)
    rep.details["residual"] = float(res.max())
    return rep


def check_weighted_norm_condition(surface, spec: ExpanderSpec | None = None) -> ConditionReport:
    """|A|^2 ((2H - lambda)^2 + 2n - lambda^2) <= 0."""
    S = sample(surface, spec)
    J, n, lam = S.jets, S.spec.n, S.spec.lam
    return _report("norm_A_weighted", -J.normA2 * ((2 * J.H - lam) ** 2 + 2 * n - lam ** 2), S)


def check_cylinder_conditions(surface, spec: ExpanderSpec | None = None, alpha: float = 1.0,
                              bound=None) -> ConditionReport:
    """The two pointwise inequalities with the A(x^T, x^T) term.

    alpha must exceed 4a^2/(1 - 4a^2) for the fitted envelope |H| <= a|x| + b.
    """
    if bound is None:
        from .measure import mean_curvature_linear_bound
        bound = mean_curvature_linear_bound(surface)
    if bound.flagged or bound.a >= 0.5:
        raise CurvatureGrowthTooLarge(f"fitted slope a = {bound.a} is not below 1/2")
    if not alpha > bound.alpha_star:
        raise AlphaTooSmall(f"alpha = {alpha} must exceed {bound.alpha_star}")
    S = sample(surface, spec)
    J, lam = S.jets, S.spec.lam
    c = (alpha + 1) / 4
    m1 = -(J.normA2 * (J.H - lam) * J.H + J.H ** 2 / 2 + c * J.A_xt_xt * J.H)
    m2 = J.normA2 * (J.H - lam) + J.H / 2 + c * J.A_xt_xt
    return _report("cylinder_conditions", np.minimum(m1, m2), S,
                   {"min_first": float(m1.min()), "min_second": float(m2.min()),
                    "a": bound.a, "b": bound.b, "alpha_star": bound.alpha_star})

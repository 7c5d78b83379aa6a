"""Extension, restriction and harmonic-extension operators and the norms they feed.

Radially symmetric data on balls and annuli (constant on every boundary
sphere) is handled in any dimension by reducing sphere integrals to one
angle.  General data is supported for n = 3 through surface grids.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _accel
from .errors import (
    DegenerateInputError,
    DomainError,
    EvaluationError,
    ParameterError,
    UnsupportedConfigurationError,
)
from .geometry import (
    DomainKind,
    DomainSpec,
    QuadratureRule,
    SurfaceGrid,
    composite_gauss_rule,
    graded_volume_rule,
    polar_angle_rule,
    polar_reduce_sphere_integral,
    power_kernel,
    sphere_area,
    surface_grid,
    volume_points,
)

DEFAULT_GRID_RESOLUTION = 32
NEAR_BOUNDARY = 1e-3
ON_BOUNDARY_TOL = 1e-9


class Representation(enum.Enum):
    COMPONENT_CONSTANT = "component-constant"
    RADIAL_PROFILE = "radial-profile"
    SAMPLED = "sampled"
    CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class BoundaryFunction:
    """Boundary data on a :class:`DomainSpec`.

    Use the classmethod constructors rather than filling fields directly.
    ``profile(radius, component)`` must accept an array of radii;
    ``func(points, component)`` an ``(m, n)`` array of boundary points.
    ``scales`` are length-scale hints used to place quadrature breakpoints for
    profiles on a half-space window.
    """

    representation: Representation
    domain: DomainSpec
    values: tuple = ()
    profile: Callable | None = None
    grids: tuple = ()
    samples: tuple = ()
    func: Callable | None = None
    scales: tuple = ()
    resolution: int = DEFAULT_GRID_RESOLUTION

    def __post_init__(self):
        rep = self.representation
        ncomp = len(self.domain.components)
        if rep is Representation.COMPONENT_CONSTANT:
            if self.domain.kind is DomainKind.HALF_SPACE_WINDOW:
                raise UnsupportedConfigurationError("use a radial profile on a half-space window")
            if len(self.values) != ncomp:
                raise ParameterError(f"need {ncomp} component values, got {len(self.values)}")
            if not all(math.isfinite(v) for v in self.values):
                raise ParameterError("component values must be finite")
        elif rep is Representation.SAMPLED:
            if self.domain.n != 3:
                raise UnsupportedConfigurationError("sampled boundary data needs n = 3")
            if len(self.grids) != ncomp or len(self.samples) != ncomp:
                raise ParameterError("need one grid and one sample array per boundary component")
            for g, v in zip(self.grids, self.samples):
                if v.shape != (len(g),):
                    raise ParameterError("sample count does not match grid size")
                if not np.all(np.isfinite(v)):
                    raise ParameterError("samples must be finite")
        elif rep is Representation.RADIAL_PROFILE and self.profile is None:
            raise ParameterError("radial profile missing")
        elif rep is Representation.CLOSED_FORM and self.func is None:
            raise ParameterError("closed-form callable missing")

    # -- constructors
    @classmethod
    def constant(cls, domain: DomainSpec, *values: float) -> "BoundaryFunction":
        """One value per boundary sphere (outer first); a single value is broadcast."""
        ncomp = len(domain.components)
        vals = tuple(float(v) for v in values)
        if len(vals) == 1 and ncomp > 1:
            vals = vals * ncomp
        return cls(Representation.COMPONENT_CONSTANT, domain, values=vals)

    @classmethod
    def two_level(cls, domain: DomainSpec, a: float) -> "BoundaryFunction":
        """Annulus data equal to 1 on the outer sphere and ``a`` on the inner one."""
        if domain.kind is not DomainKind.ANNULUS:
            raise UnsupportedConfigurationError("two-level data lives on an annulus")
        return cls.constant(domain, 1.0, a)

    @classmethod
    def radial(cls, domain: DomainSpec, profile: Callable, scales=()) -> "BoundaryFunction":
        return cls(Representation.RADIAL_PROFILE, domain, profile=profile, scales=tuple(scales))

    @classmethod
    def sampled(cls, domain: DomainSpec, grids, samples) -> "BoundaryFunction":
        samples = tuple(np.asarray(v, dtype=float) for v in samples)
        for v in samples:
            v.setflags(write=False)
        return cls(Representation.SAMPLED, domain, grids=tuple(grids), samples=samples)

    @classmethod
    def closed_form(cls, domain: DomainSpec, func: Callable, resolution: int = DEFAULT_GRID_RESOLUTION):
        return cls(Representation.CLOSED_FORM, domain, func=func, resolution=int(resolution))

    # -- helpers
    @property
    def n(self) -> int:
        return self.domain.n

    @property
    def is_radial(self) -> bool:
        """True when the data is constant on every boundary sphere."""
        on_spheres = self.domain.kind is not DomainKind.HALF_SPACE_WINDOW
        return on_spheres and self.representation in (Representation.COMPONENT_CONSTANT,
                                                      Representation.RADIAL_PROFILE)

    def component_values(self) -> np.ndarray:
        if not self.is_radial:
            raise UnsupportedConfigurationError("data is not constant on the boundary spheres")
        if self.representation is Representation.COMPONENT_CONSTANT:
            return np.array(self.values)
        vals = [float(np.asarray(self.profile(np.array([rad]), label)).ravel()[0])
                for label, rad in self.domain.components]
        if not all(math.isfinite(v) for v in vals):
            raise EvaluationError("radial profile returned a non-finite value")
        return np.array(vals)

    def to_sampled(self, resolution: int | None = None) -> "BoundaryFunction":
        """Sample onto surface grids (n = 3)."""
        if self.representation is Representation.SAMPLED:
            return self
        if self.n != 3 or self.domain.kind is DomainKind.HALF_SPACE_WINDOW:
            raise UnsupportedConfigurationError("grid sampling needs a 3-D ball or annulus")
        res = int(resolution or self.resolution)
        grids, samples = [], []
        for k, (label, rad) in enumerate(self.domain.components):
            g = surface_grid(rad, res, 3, label)
            if self.representation is Representation.CLOSED_FORM:
                v = np.asarray(self.func(g.points, label), dtype=float)
            else:
                v = np.full(len(g), self.component_values()[k])
            grids.append(g)
            samples.append(np.broadcast_to(v, (len(g),)).copy())
        return BoundaryFunction.sampled(self.domain, grids, samples)

    def scaled(self, lam: float) -> "BoundaryFunction":
        rep = self.representation
        if rep is Representation.COMPONENT_CONSTANT:
            return replace(self, values=tuple(lam * v for v in self.values))
        if rep is Representation.SAMPLED:
            return BoundaryFunction.sampled(self.domain, self.grids, [lam * v for v in self.samples])
        if rep is Representation.RADIAL_PROFILE:
            prof = self.profile
            return replace(self, profile=lambda rad, comp: lam * np.asarray(prof(rad, comp)))
        fn = self.func
        return replace(self, func=lambda pts, comp: lam * np.asarray(fn(pts, comp)))

    def is_zero(self) -> bool:
        rep = self.representation
        if rep is Representation.COMPONENT_CONSTANT:
            return all(v == 0.0 for v in self.values)
        if rep is Representation.SAMPLED:
            return all(not np.any(v) for v in self.samples)
        return False


@dataclass(frozen=True)
class InteriorField:
    """A function on the domain; ``radial`` is set when it depends on ``|x|`` only."""

    evaluator: Callable
    domain: DomainSpec
    provenance: str = "user"
    radial: Callable | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.evaluator(np.atleast_2d(np.asarray(x, dtype=float)))

    @classmethod
    def from_radial(cls, domain, radial, provenance="user", **meta):
        def evaluator(pts):
            return np.asarray(radial(np.linalg.norm(pts, axis=-1)), dtype=float)
        return cls(evaluator, domain, provenance, radial, dict(meta))

    def scaled(self, lam):
        ev, rad = self.evaluator, self.radial
        return InteriorField(lambda p: lam * ev(p), self.domain, self.provenance,
                             None if rad is None else (lambda s: lam * np.asarray(rad(s))), self.meta)


@dataclass(frozen=True)
class NormEstimate:
    """A quadrature value with an error estimate from two refinement levels."""

    value: float
    error: float
    meta: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


# ------------------------------------------------------------------ checks

def _check_alpha(alpha, n):
    if not 1.0 < alpha < n:
        raise ParameterError(f"alpha must lie in (1, {n}), got {alpha!r}")


def _as_points(x, n):
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[-1] != n:
        raise ParameterError(f"points must have {n} coordinates, got shape {pts.shape}")
    return pts


def _check_inside(domain, pts):
    inside = domain.contains(pts)
    if not np.all(inside):
        bad = pts[np.argmin(inside)]
        raise DomainError(f"point {bad.tolist()} is not strictly inside the domain")


def _boundary_component(domain, y):
    rad = float(np.linalg.norm(y))
    for k, (label, r) in enumerate(domain.components):
        if abs(rad - r) <= ON_BOUNDARY_TOL * max(1.0, r):
            return k, label, r
    raise DomainError(f"point with |y| = {rad} is not on the boundary")


def _finish(values, squeeze):
    return float(values[0]) if squeeze else values


# ------------------------------------------------------------------ E_alpha

def riesz_extension_radial(f: BoundaryFunction, alpha: float, radii) -> np.ndarray:
    """``E_alpha f`` at interior radii for data constant on each boundary sphere."""
    n = f.n
    vals = f.component_values()
    kern = power_kernel(alpha - n)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    out = np.zeros(radii.shape)
    for (label, rho), v in zip(f.domain.components, vals):
        if v == 0.0:
            continue
        out += v * np.array([polar_reduce_sphere_integral(n, rho, s, kern) for s in radii])
    return out


def _halfspace_radial_rule(R, center, spread, scales, order=16):
    base = min([spread] + [s for s in scales if s > 0]) / 8.0
    bps = [0.0, R]
    b = base
    while b < R:
        bps.append(b)
        b *= 2.0
    step = spread / 4.0
    while step < R:
        for p in (center - step, center + step):
            if 0.0 < p < R:
                bps.append(p)
        step *= 2.0
    if 0.0 < center < R:
        bps.append(center)
    return composite_gauss_rule(bps, order, target="half-space-radial")


def _halfspace_extension(f, alpha, x):
    n = f.n
    R = f.domain.R
    s = float(np.linalg.norm(x[:-1]))
    h = float(x[-1])
    kern = power_kernel(alpha - n, offset=h)
    rule = _halfspace_radial_rule(R, s, h, f.scales)
    rho = rule.nodes
    prof = np.asarray(f.profile(rho, "flat"), dtype=float)
    if not np.all(np.isfinite(prof)):
        raise EvaluationError("radial profile returned a non-finite value")
    ring = np.array([
        polar_reduce_sphere_integral(n - 1, r, s, kern, rule=polar_angle_rule(s, r, 16, spread=h)) if p != 0.0 else 0.0
        for r, p in zip(rho, prof)
    ])
    return float(np.dot(rule.weights, prof * ring))


def _nearest_sample(f, k, pts):
    """Value of component ``k`` samples at the grid node nearest to each point's direction."""
    g = f.grids[k]
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    dirs = np.where(norms > 0.0, pts / np.where(norms > 0.0, norms, 1.0), np.array([0.0, 0.0, 1.0]))
    idx = np.argmax(dirs @ (g.points / g.radius).T, axis=1)
    return f.samples[k][idx]


def _grid_sum(f, pts, power):
    out = np.zeros(pts.shape[0])
    for g, v in zip(f.grids, f.samples):
        out += _accel.riesz_sum(pts, g.points, g.weights * v, power)
    return out


def _grid_extension(f, alpha, pts):
    f = f.to_sampled()
    n = f.n
    power = n - alpha
    out = _grid_sum(f, pts, power)
    rad = np.linalg.norm(pts, axis=1)
    near_any = np.zeros(pts.shape[0], dtype=bool)
    kern = power_kernel(alpha - n)
    for k, (g, v) in enumerate(zip(f.grids, f.samples)):
        spacing = math.pi * g.radius / math.sqrt(len(g) / 2.0)
        near = np.abs(rad - g.radius) < max(NEAR_BOUNDARY, 2.0 * spacing)
        if not np.any(near):
            continue
        near_any |= near
        # subtract the nearest sample: the constant part is integrated by polar reduction
        p_near = pts[near]
        fstar = _nearest_sample(f, k, p_near)
        exact = np.array([polar_reduce_sphere_integral(n, g.radius, s, kern) for s in rad[near]])
        out[near] += fstar * (exact - _accel.riesz_sum(p_near, g.points, g.weights, power))
    return out, near_any


def extend_riesz(f: BoundaryFunction, alpha: float, x):
    """``E_alpha f(x) = int_{dOmega} f(y) |x - y|^{alpha - n} dS_y``.

    ``x`` is one interior point or an ``(m, n)`` array of them.
    """
    n = f.n
    _check_alpha(alpha, n)
    squeeze = np.asarray(x).ndim == 1
    pts = _as_points(x, n)
    _check_inside(f.domain, pts)
    if f.domain.kind is DomainKind.HALF_SPACE_WINDOW:
        if f.representation is not Representation.RADIAL_PROFILE:
            raise UnsupportedConfigurationError("half-space windows take radial profiles only")
        return _finish(np.array([_halfspace_extension(f, alpha, p) for p in pts]), squeeze)
    if f.is_radial:
        return _finish(riesz_extension_radial(f, alpha, np.linalg.norm(pts, axis=1)), squeeze)
    values, _ = _grid_extension(f, alpha, pts)
    return _finish(values, squeeze)


def riesz_field(f: BoundaryFunction, alpha: float = 2.0) -> InteriorField:
    """``E_alpha f`` as an :class:`InteriorField`."""
    _check_alpha(alpha, f.n)
    if f.is_radial:
        return InteriorField.from_radial(f.domain, lambda s: riesz_extension_radial(f, alpha, s),
                                         provenance=f"E_{alpha:g}")
    if f.domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("interior fields on half-space windows are not supported")
    fs = f.to_sampled()
    return InteriorField(lambda pts: _grid_extension(fs, alpha, pts)[0], f.domain, f"E_{alpha:g}")


# ------------------------------------------------------------------ R_alpha

def restrict_riesz(g: InteriorField, alpha: float, y, rule: QuadratureRule | None = None) -> float:
    """``R_alpha g(y) = int_Omega g(x) |x - y|^{alpha - n} dx`` for a boundary point ``y``."""
    domain = g.domain
    n = domain.n
    _check_alpha(alpha, n)
    if domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("restriction is implemented on balls and annuli")
    y = np.asarray(y, dtype=float)
    if y.shape != (n,):
        raise ParameterError(f"y must be a single point in R^{n}")
    _boundary_component(domain, y)
    rule = rule or graded_volume_rule(domain)
    s = float(np.linalg.norm(y))
    kern = power_kernel(alpha - n)
    shell = np.array([polar_reduce_sphere_integral(n, rho, s, kern) for rho in rule.nodes])
    dr = rule.meta["dr_weights"]
    if g.radial is not None:
        vals = _checked(np.asarray(g.radial(rule.nodes), dtype=float), rule.nodes)
        return float(np.dot(dr, vals * shell))
    # non-radial (n = 3): subtract the values along the ray through y, which
    # removes the kernel singularity; the ray part is a radial field
    yhat = y / s
    ray_vals = _checked(g(rule.nodes[:, None] * yhat[None, :]), rule.nodes)
    radial_part = float(np.dot(dr, ray_vals * shell))
    pts, w = volume_points(rule)
    gv = _checked(g(pts), pts)
    ray = np.repeat(ray_vals, pts.shape[0] // rule.nodes.shape[0])
    return radial_part + float(_accel.riesz_sum(y[None, :], pts, w * (gv - ray), n - alpha)[0])


def _checked(values, nodes):
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = np.asarray(nodes)[np.argmax(bad)]
        raise EvaluationError(f"non-finite field value at node {np.atleast_1d(node).tolist()}", node=node)
    return values


# ------------------------------------------------------------------ P_2

def _annulus_radial_harmonic(domain, outer, inner, radii):
    """Solve ``(rho^{n-1} u')' = 0`` with ``u(1) = outer`` and ``u(r) = inner``."""
    n = domain.n
    mat = np.array([[1.0, 1.0], [domain.r ** (2 - n), 1.0]])
    c1, c2 = np.linalg.solve(mat, np.array([outer, inner]))
    return c1 * np.asarray(radii) ** (2 - n) + c2


def _ball_poisson_radial(f, radii):
    n = f.n
    val = f.component_values()[0]
    area = sphere_area(n)
    kern = power_kernel(-n)
    return np.array([val * (1.0 - s * s) / area * polar_reduce_sphere_integral(n, 1.0, s, kern) for s in radii])


def _ball_poisson_grid(f, pts):
    f = f.to_sampled()
    g, v = f.grids[0], f.samples[0]
    fstar = _nearest_sample(f, 0, pts)
    rad2 = np.sum(pts * pts, axis=1)
    # subtract a constant per target: the Poisson kernel reproduces constants exactly
    sums = _accel.riesz_sum(pts, g.points, g.weights * v, 3) - fstar * _accel.riesz_sum(pts, g.points, g.weights, 3)
    return fstar + (1.0 - rad2) / (4.0 * math.pi) * sums


def harmonic_extend(f: BoundaryFunction, x):
    """Harmonic function with boundary values ``f``, evaluated at interior points."""
    squeeze = np.asarray(x).ndim == 1
    pts = _as_points(x, f.n)
    _check_inside(f.domain, pts)
    radii = np.linalg.norm(pts, axis=1)
    kind = f.domain.kind
    if kind is DomainKind.BALL:
        if f.is_radial:
            return _finish(_ball_poisson_radial(f, radii), squeeze)
        if f.n == 3:
            return _finish(_ball_poisson_grid(f, pts), squeeze)
    elif kind is DomainKind.ANNULUS and f.is_radial:
        outer, inner = f.component_values()
        return _finish(_annulus_radial_harmonic(f.domain, outer, inner, radii), squeeze)
    raise UnsupportedConfigurationError(
        f"harmonic extension of {f.representation.value} data on a {kind.value} (n={f.n}) is not supported")


def harmonic_field(f: BoundaryFunction) -> InteriorField:
    kind = f.domain.kind
    if f.is_radial and kind is DomainKind.ANNULUS:
        outer, inner = f.component_values()
        return InteriorField.from_radial(f.domain, lambda s: _annulus_radial_harmonic(f.domain, outer, inner, s),
                                         provenance="P_2")
    if f.is_radial and kind is DomainKind.BALL:
        return InteriorField.from_radial(f.domain, lambda s: _ball_poisson_radial(f, np.atleast_1d(s)),
                                         provenance="P_2")
    if kind is DomainKind.BALL and f.n == 3:
        fs = f.to_sampled()
        return InteriorField(lambda pts: _ball_poisson_grid(fs, pts), f.domain, "P_2")
    raise UnsupportedConfigurationError(
        f"harmonic extension of {f.representation.value} data on a {kind.value} (n={f.n}) is not supported")


# ------------------------------------------------------------------ norms

def _line_rule_for_profile(f):
    R = f.domain.R
    scales = [s for s in f.scales if s > 0] or [min(1.0, R)]
    bps = [0.0, R]
    b = min(scales) / 8.0
    while b < R:
        bps.append(b)
        b *= 2.0
    return composite_gauss_rule(bps, 16, target="half-space-radial")


def integrate_boundary(f: BoundaryFunction, transform: Callable = lambda v: v) -> float:
    """``int_{dOmega} transform(f) dS``."""
    n = f.n
    if f.domain.kind is DomainKind.HALF_SPACE_WINDOW:
        if f.representation is not Representation.RADIAL_PROFILE:
            raise UnsupportedConfigurationError("half-space windows take radial profiles only")
        rule = _line_rule_for_profile(f)
        vals = _checked(f.profile(rule.nodes, "flat"), rule.nodes)
        return sphere_area(n - 1) * float(np.dot(rule.weights, transform(vals) * rule.nodes ** (n - 2)))
    if f.is_radial:
        one = lambda d: np.ones_like(d)
        total = 0.0
        for (label, rho), v in zip(f.domain.components, f.component_values()):
            total += float(transform(np.array([v]))[0]) * polar_reduce_sphere_integral(n, rho, 0.0, one)
        return total
    fs = f.to_sampled()
    return float(sum(np.dot(g.weights, transform(v)) for g, v in zip(fs.grids, fs.samples)))


def lp_norm_boundary(f: BoundaryFunction, p: float) -> float:
    """``(int_{dOmega} |f|^p dS)^{1/p}``."""
    if not p >= 1.0:
        raise ParameterError(f"need p >= 1, got {p!r}")
    return integrate_boundary(f, lambda v: np.abs(v) ** p) ** (1.0 / p)


def radial_profile_tail_power(profile: Callable, n: int, p: float, R: float, scale: float = 1.0) -> float:
    """``int_{|y| > R} |profile(|y|)|^p dy`` over R^{n-1}, mapped to ``(0, 1]`` by ``rho = R / u``."""
    bps = [0.0, 1.0]
    b = 1.0
    while b > 1e-12 * min(1.0, scale / R):
        b /= 2.0
        bps.append(b)
    rule = composite_gauss_rule(bps, 16)
    u = rule.nodes
    rho = R / u
    vals = np.abs(np.asarray(profile(rho), dtype=float)) ** p
    return sphere_area(n - 1) * float(np.dot(rule.weights, vals * rho ** (n - 2) * R / (u * u)))


def _interior_values(g, rule, angular):
    if g.radial is not None:
        return _checked(g.radial(rule.nodes), rule.nodes), rule.weights
    pts, w = volume_points(rule, angular)
    return _checked(g(pts), pts), w


def integrate_interior(g: InteriorField, transform: Callable = lambda v: v, rule: QuadratureRule | None = None,
                       grading: float = 3.0, radial_order: int = 64, angular: int = 16) -> NormEstimate:
    """``int_Omega transform(g) dx`` with an error estimate from halving the radial order."""
    domain = g.domain
    if domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("interior integrals on half-space windows are not supported")
    if rule is None:
        rule = graded_volume_rule(domain, grading, (radial_order, angular))
    coarse = graded_volume_rule(domain, rule.meta["grading"][0], (max(2, rule.meta["orders"][0] // 2), angular))
    vals, w = _interior_values(g, rule, angular)
    fine_val = float(np.dot(w, transform(vals)))
    cvals, cw = _interior_values(g, coarse, max(4, angular // 2) if g.radial is None else angular)
    coarse_val = float(np.dot(cw, transform(cvals)))
    err = abs(fine_val - coarse_val) + 8.0 * np.finfo(float).eps * abs(fine_val)
    return NormEstimate(fine_val, err, {"orders": rule.meta["orders"], "coarse": coarse_val})


def lq_norm_interior(g: InteriorField, q: float, rule: QuadratureRule | None = None, **kw) -> NormEstimate:
    """``(int_Omega |g|^q dx)^{1/q}`` with a two-level error estimate."""
    if not q >= 1.0:
        raise ParameterError(f"need q >= 1, got {q!r}")
    power = integrate_interior(g, lambda v: np.abs(v) ** q, rule, **kw)
    if power.value == 0.0:
        return NormEstimate(0.0, 0.0, power.meta)
    value = power.value ** (1.0 / q)
    return NormEstimate(value, value * power.error / (q * power.value), power.meta)


def radial_power_whole_space(profile: Callable, n: int, p: float, span=(-40.0, 40.0), panel: float = 0.5) -> float:
    """``int_{R^{n-1}} |profile(|y|)|^p dy`` on a fixed composite Gauss rule in ``log rho``.

    The rule does not depend on the profile, so scale-invariant integrands
    give scale-independent results up to rounding.
    """
    lo, hi = span
    count = int(round((hi - lo) / panel))
    rule = composite_gauss_rule(np.linspace(lo, hi, count + 1), 16)
    rho = np.exp(rule.nodes)
    vals = np.abs(np.asarray(profile(rho), dtype=float)) ** p
    return sphere_area(n - 1) * float(np.dot(rule.weights, vals * rho ** (n - 1)))

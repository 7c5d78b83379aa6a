"""Domains and quadrature.

Conventions: ``omega_n = |B_1|`` is the volume of the unit ball in R^n, so
the unit sphere S^{n-1} has area ``n * omega_n``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    InvalidDimensionError,
    ParameterError,
    SingularConfigurationError,
    UnsupportedConfigurationError,
)

MAX_DIMENSION = 16
BOUNDARY_GAP = 1e-12


def unit_ball_volume(n: int) -> float:
    """Volume ``pi**(n/2) / Gamma(n/2 + 1)`` of the unit ball in R^n."""
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n!r}")
    return math.exp(0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0))


def sphere_area(n: int, radius: float = 1.0) -> float:
    """Area ``n * omega_n * radius**(n-1)`` of the sphere of given radius in R^n."""
    return n * unit_ball_volume(n) * radius ** (n - 1)


class DomainKind(enum.Enum):
    BALL = "ball"
    ANNULUS = "annulus"
    HALF_SPACE_WINDOW = "halfspace"


@dataclass(frozen=True)
class DomainSpec:
    """Ball ``B_1``, annulus ``B_1 minus B_r``, or half-ball window ``B_R^+``."""

    kind: DomainKind
    n: int
    r: float | None = None
    R: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or not 3 <= self.n <= MAX_DIMENSION:
            raise InvalidDimensionError(f"n must be an integer in [3, {MAX_DIMENSION}], got {self.n!r}")
        if self.kind is DomainKind.ANNULUS:
            if self.r is None or not 0.0 < self.r < 1.0:
                raise ParameterError(f"annulus inner radius must lie in (0, 1), got {self.r!r}")
        elif self.kind is DomainKind.HALF_SPACE_WINDOW:
            if self.R is None or not self.R > 0.0:
                raise ParameterError(f"truncation radius must be positive, got {self.R!r}")

    @classmethod
    def ball(cls, n):
        return cls(DomainKind.BALL, n)

    @classmethod
    def annulus(cls, n, r):
        return cls(DomainKind.ANNULUS, n, r=float(r))

    @classmethod
    def half_space_window(cls, n, R):
        return cls(DomainKind.HALF_SPACE_WINDOW, n, R=float(R))

    @property
    def components(self) -> tuple[tuple[str, float], ...]:
        """Boundary components as ``(label, radius)`` pairs, outer sphere first."""
        if self.kind is DomainKind.BALL:
            return (("outer", 1.0),)
        if self.kind is DomainKind.ANNULUS:
            return (("outer", 1.0), ("inner", self.r))
        return (("flat", self.R),)

    def volume(self) -> float:
        w = unit_ball_volume(self.n)
        if self.kind is DomainKind.BALL:
            return w
        if self.kind is DomainKind.ANNULUS:
            return w * (1.0 - self.r ** self.n)
        return 0.5 * w * self.R ** self.n

    def boundary_area(self) -> float:
        """Area of the boundary carrying the data (the flat disc for a window)."""
        if self.kind is DomainKind.BALL:
            return sphere_area(self.n)
        if self.kind is DomainKind.ANNULUS:
            return sphere_area(self.n) + sphere_area(self.n, self.r)
        return unit_ball_volume(self.n - 1) * self.R ** (self.n - 1)

    def contains(self, x, gap=0.0) -> np.ndarray:
        """Boolean mask of points strictly inside, at least ``gap`` from the boundary."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        rad = np.linalg.norm(x, axis=-1)
        if self.kind is DomainKind.BALL:
            return rad < 1.0 - gap
        if self.kind is DomainKind.ANNULUS:
            return (rad < 1.0 - gap) & (rad > self.r + gap)
        return (rad < self.R - gap) & (x[:, -1] > gap)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape[0] != weights.shape[0]:
            raise ParameterError("node and weight counts differ")
        if np.any(weights <= 0.0):
            raise ParameterError("quadrature weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.shape[0]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class SurfaceGrid:
    points: np.ndarray
    weights: np.ndarray
    component: str
    radius: float

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    def __len__(self):
        return self.points.shape[0]


def gauss_rule_1d(order: int, interval=(-1.0, 1.0)) -> QuadratureRule:
    """Gauss-Legendre rule of the given order mapped to ``[a, b]``."""
    a, b = map(float, interval)
    if int(order) != order or order < 1:
        raise ParameterError(f"order must be a positive integer, got {order!r}")
    if not a < b:
        raise ParameterError(f"need a < b, got [{a}, {b}]")
    x, w = np.polynomial.legendre.leggauss(int(order))
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w,
                          {"kind": "gauss-legendre", "order": int(order), "interval": (a, b)})


def composite_gauss_rule(breakpoints, order: int = 16, **meta) -> QuadratureRule:
    """Gauss-Legendre of ``order`` on every panel between consecutive breakpoints."""
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    x, w = np.polynomial.legendre.leggauss(int(order))
    lo, hi = bp[:-1], bp[1:]
    keep = hi > lo
    lo, hi = lo[keep], hi[keep]
    half = 0.5 * (hi - lo)
    nodes = (half[:, None] * x[None, :] + 0.5 * (hi + lo)[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    info = {"kind": "composite-gauss", "order": int(order), "interval": (float(bp[0]), float(bp[-1])),
            "panels": int(lo.size)}
    info.update(meta)
    return QuadratureRule(nodes, weights, info)


def _geometric_points(start, stop, ratio=2.0):
    pts = []
    b = start
    while b < stop:
        pts.append(b)
        b *= ratio
    return pts


def polar_angle_rule(s: float, rho: float, order: int = 16, spread: float = 0.0) -> QuadratureRule:
    """Composite rule on ``[0, pi]`` graded toward ``theta = 0``.

    The panels shrink geometrically down to the angular width of the nearly
    singular region, ``hypot(|s - rho|, spread) / sqrt(s * rho)``.
    """
    width = math.hypot(s - rho, spread)
    bps = [0.0, math.pi]
    if s > 0.0 and rho > 0.0:
        theta_star = width / (math.sqrt(s) * math.sqrt(rho))  # no underflow for tiny s
        if theta_star == 0.0:
            theta_star = 1e-3
        bps += _geometric_points(0.25 * theta_star, math.pi)
    return composite_gauss_rule(bps, order, target="polar-angle")


def polar_reduce_sphere_integral(n: int, rho: float, s: float, kernel: Callable, rule: QuadratureRule | None = None,
                                 order: int = 16) -> float:
    """Integrate ``kernel(|x - y|)`` over the sphere ``|y| = rho`` in R^n for ``|x| = s``.

    Uses ``area(S^{n-2}) rho^{n-1} int_0^pi G(d(theta)) sin^{n-2}(theta) dtheta``.
    ``kernel`` must accept a numpy array of distances.
    """
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"need n >= 2, got {n!r}")
    if rho < 0.0 or s < 0.0:
        raise ParameterError("radii must be nonnegative")
    if s == rho:
        with np.errstate(all="ignore"):
            at_zero = np.asarray(kernel(np.zeros(1)), dtype=float)
        if not np.all(np.isfinite(at_zero)):
            raise SingularConfigurationError(f"kernel is singular on the sphere (s = rho = {rho})")
    if rule is None:
        rule = polar_angle_rule(s, rho, order)
    else:
        lo, hi = rule.meta.get("interval", (None, None))
        if lo is None or abs(lo) > 1e-15 or abs(hi - math.pi) > 1e-12:
            raise ParameterError("rule must cover [0, pi]")
    theta = rule.nodes
    half_sin = np.sin(0.5 * theta)
    d = np.sqrt((s - rho) ** 2 + 4.0 * s * rho * half_sin * half_sin)
    integrand = np.asarray(kernel(d), dtype=float) * np.sin(theta) ** (n - 2)
    return sphere_area(n - 1) * rho ** (n - 1) * float(np.dot(rule.weights, integrand))


def power_kernel(exponent: float, offset: float = 0.0) -> Callable:
    """``d -> (d**2 + offset**2)**(exponent/2)``; ``exponent`` is typically negative."""
    if offset == 0.0:
        return lambda d: d ** exponent
    o2 = offset * offset
    return lambda d: (d * d + o2) ** (0.5 * exponent)


def surface_grid(radius: float, resolution: int, n: int = 3, component: str = "outer") -> SurfaceGrid:
    """Product rule on the sphere of given radius in R^3.

    Gauss-Legendre in ``cos(theta)`` with ``resolution`` nodes times
    ``2 * resolution`` uniform azimuths.
    """
    if n != 3:
        raise UnsupportedConfigurationError("surface grids are only available for n = 3")
    if int(resolution) != resolution or resolution < 4:
        raise ParameterError(f"resolution must be an integer >= 4, got {resolution!r}")
    t, wt = np.polynomial.legendre.leggauss(int(resolution))
    n_phi = 2 * int(resolution)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - t * t)
    pts = np.stack([
        np.outer(st, np.cos(phi)).ravel(),
        np.outer(st, np.sin(phi)).ravel(),
        np.repeat(t, n_phi),
    ], axis=1) * radius
    w = np.repeat(wt, n_phi) * (2.0 * math.pi / n_phi) * radius ** 2
    return SurfaceGrid(pts, w, component, float(radius))


def _graded_segment(order, beta, a, b, toward):
    """Gauss nodes on [a, b] mapped by a power law clustering at ``toward`` (a or b)."""
    u, wu = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    if toward == "a":
        rho = a + (b - a) * u ** beta
        jac = (b - a) * beta * u ** (beta - 1.0)
    else:
        rho = b - (b - a) * (1.0 - u) ** beta
        jac = (b - a) * beta * (1.0 - u) ** (beta - 1.0)
    return rho, wu * jac


def _capped_grading(order, beta, length):
    # nodes must stay BOUNDARY_GAP away from the graded end
    u_min = 0.5 * (1.0 + np.polynomial.legendre.leggauss(order)[0][0])
    limit = math.log(BOUNDARY_GAP / length) / math.log(u_min)
    return min(beta, limit)


def graded_volume_rule(domain: DomainSpec, grading: float = 3.0, orders=(64, 16)) -> QuadratureRule:
    """Radial rule for integrals over the domain, clustered at the boundary spheres.

    ``nodes`` are radii and ``weights`` carry the shell measure
    ``area(S^{n-1}) rho^{n-1} drho``, so ``rule.integrate(h(nodes))`` is the
    volume integral of the radial function ``h``.  ``meta['dr_weights']``
    holds the bare ``drho`` weights.  The angular order is recorded for
    building full point sets with :func:`volume_points` (n = 3).
    """
    if grading < 1.0:
        raise ParameterError(f"grading exponent must be >= 1, got {grading!r}")
    radial, angular = orders
    radial = int(radial)
    n = domain.n
    if domain.kind is DomainKind.BALL:
        beta = _capped_grading(radial, grading, 1.0)
        rho, dr = _graded_segment(radial, beta, 0.0, 1.0, "b")
        betas = (beta,)
    elif domain.kind is DomainKind.ANNULUS:
        mid = 0.5 * (1.0 + domain.r)
        half = mid - domain.r
        b1 = _capped_grading(radial, grading, half)
        b2 = _capped_grading(radial, grading, half)
        r1, w1 = _graded_segment(radial, b1, domain.r, mid, "a")
        r2, w2 = _graded_segment(radial, b2, mid, 1.0, "b")
        rho, dr = np.concatenate([r1, r2]), np.concatenate([w1, w2])
        betas = (b1, b2)
    else:
        beta = _capped_grading(radial, grading, domain.R)
        rho, dr = _graded_segment(radial, beta, 0.0, domain.R, "b")
        betas = (beta,)
    shell = sphere_area(n) * rho ** (n - 1)
    if domain.kind is DomainKind.HALF_SPACE_WINDOW:
        shell = 0.5 * shell
    return QuadratureRule(rho, shell * dr, {
        "kind": "graded-volume", "domain": domain, "grading": tuple(betas),
        "orders": (radial, int(angular)), "dr_weights": dr, "target": "volume",
    })


def volume_points(rule: QuadratureRule, resolution: int | None = None):
    """Expand a radial volume rule on a 3-D ball or annulus into points and weights."""
    domain = rule.meta["domain"]
    if domain.n != 3 or domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("full volume point sets exist only for 3-D balls and annuli")
    res = int(resolution or rule.meta["orders"][1])
    grid = surface_grid(1.0, res)
    pts = (rule.nodes[:, None, None] * grid.points[None, :, :]).reshape(-1, 3)
    w = (rule.weights[:, None] * grid.weights[None, :] / (4.0 * math.pi)).ravel()
    return pts, w

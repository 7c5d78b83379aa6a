"""Exact reference formulas.

Everything here is evaluated from closed-form expressions and serves as the
oracle for the quadrature-based modules.  Powers of ``omega_n`` are
accumulated in the log domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, InvalidDimensionError, ParameterError
from .geometry import sphere_area, unit_ball_volume


def _log_omega(n):
    return 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0)


def _check_n(n):
    if int(n) != n or n < 3:
        raise InvalidDimensionError(f"need an integer dimension n >= 3, got {n!r}")


def _radius(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else float(np.linalg.norm(x))


def single_layer_ball(x, n: int) -> float:
    """``int_{S^{n-1}} |x - y|^{2-n} dS_y``, which equals ``n omega_n`` for ``|x| < 1``.

    ``x`` may be a point or its norm.
    """
    _check_n(n)
    if _radius(x) >= 1.0:
        raise DomainError("single_layer_ball needs |x| < 1")
    return sphere_area(n)


def single_layer_sphere_exterior(x, r: float, n: int) -> float:
    """Newton single layer of the sphere ``|y| = r`` at a point with ``|x| > r``."""
    _check_n(n)
    s = _radius(x)
    if s <= r:
        raise DomainError("single_layer_sphere_exterior needs |x| > r")
    return sphere_area(n) * r ** (n - 1) / s ** (n - 2)


def sharp_constant_ball(n: int) -> float:
    """Sharp extension constant of the unit ball,
    ``n^{(n-2)/(2(n-1))} omega_n^{1 - 1/n - 1/(2(n-1))}``."""
    _check_n(n)
    log_val = (n - 2) / (2.0 * (n - 1)) * math.log(n) + (1.0 - 1.0 / n - 1.0 / (2.0 * (n - 1))) * _log_omega(n)
    return math.exp(log_val)


def isoperimetric_ball(n: int) -> float:
    """``|B_1|^{1/n} / |S^{n-1}|^{1/(n-1)} = n^{-1/(n-1)} omega_n^{-1/(n(n-1))}``."""
    _check_n(n)
    return math.exp(-math.log(n) / (n - 1) - _log_omega(n) / (n * (n - 1)))


def theta2_ball(n: int) -> float:
    """Poisson extension constant of the ball, ``omega_n^{(n-2)/(2n)} / (n omega_n)^{(n-2)/(2(n-1))}``."""
    _check_n(n)
    lw = _log_omega(n)
    return math.exp((n - 2) / (2.0 * n) * lw - (n - 2) / (2.0 * (n - 1)) * (math.log(n) + lw))


@dataclass(frozen=True)
class SharpConstants:
    n: int
    e2_ball: float
    theta2_ball: float
    isoperimetric_ball: float


def sharp_constants(n: int) -> SharpConstants:
    return SharpConstants(n, sharp_constant_ball(n), theta2_ball(n), isoperimetric_ball(n))


def critical_exponent(n: int) -> float:
    return 2.0 * n / (n - 2.0)


def boundary_exponent(n: int) -> float:
    """Exponent ``2(n-1)/n`` of the boundary norm in the Riesz quotient."""
    return 2.0 * (n - 1.0) / n


def poisson_boundary_exponent(n: int) -> float:
    """Exponent ``2(n-1)/(n-2)`` of the boundary norm in the Poisson quotient."""
    return 2.0 * (n - 1.0) / (n - 2.0)


# ---------------------------------------------------------------- bubbles

@dataclass(frozen=True)
class BubbleParams:
    eps: float
    n: int

    def __post_init__(self):
        if not self.eps > 0.0:
            raise ParameterError(f"bubble scale must be positive, got {self.eps!r}")
        _check_n(self.n)


def bubble_f(p: BubbleParams, y):
    """Boundary bubble ``(eps / (eps^2 + |y|^2))^{n/2}`` on R^{n-1}.

    ``y`` is an array of points of shape ``(..., n-1)``; a scalar is read as ``|y|``.
    """
    y = np.asarray(y, dtype=float)
    r2 = y * y if y.ndim == 0 else np.sum(y * y, axis=-1)
    return (p.eps / (p.eps ** 2 + r2)) ** (0.5 * p.n)


def bubble_f_radial(p: BubbleParams, rho):
    rho = np.asarray(rho, dtype=float)
    return (p.eps / (p.eps ** 2 + rho * rho)) ** (0.5 * p.n)


def bubble_g(p: BubbleParams, x):
    """Interior bubble ``(eps / ((x_n + eps)^2 + |x'|^2))^{(n+2)/2}`` on the upper half-space."""
    x = np.asarray(x, dtype=float)
    if np.any(x[..., -1] < 0.0):
        raise DomainError("bubble_g needs x_n >= 0")
    tang = np.sum(x[..., :-1] ** 2, axis=-1)
    return (p.eps / ((x[..., -1] + p.eps) ** 2 + tang)) ** (0.5 * (p.n + 2))


def bubble_boundary_norm(n: int) -> float:
    """``||f_eps||_{L^{2(n-1)/n}(R^{n-1})}``, independent of ``eps``.

    The ``p``-th power is ``area(S^{n-2}) B((n-1)/2, (n-1)/2) / 2``.
    """
    _check_n(n)
    a = 0.5 * (n - 1)
    power = sphere_area(n - 1) * 0.5 * special.beta(a, a)
    return power ** (1.0 / boundary_exponent(n))


def bubble_tail_power(eps: float, R: float, n: int) -> float:
    """``||f_eps||^{2(n-1)/n}`` over ``{|y| > R}`` via the regularized incomplete beta function."""
    _check_n(n)
    a = 0.5 * (n - 1)
    t = R / eps
    u0 = t * t / (1.0 + t * t)
    return sphere_area(n - 1) * 0.5 * special.beta(a, a) * special.betainc(a, a, 1.0 - u0)


def bubble_extension_on_axis_n3(xn):
    """Half-space extension of ``f_1`` at ``(0, 0, x_n)`` in R^3: ``2 pi / (1 + x_n)``."""
    return 2.0 * math.pi / (1.0 + np.asarray(xn, dtype=float))


# ---------------------------------------------------------------- annulus

@dataclass(frozen=True)
class AnnulusHarmonicCoeffs:
    c1: float
    c2: float
    r: float
    a: float
    n: int

    def __call__(self, rad):
        return self.c1 * np.asarray(rad, dtype=float) ** (2 - self.n) + self.c2


def annulus_harmonic_coeffs(r: float, a: float, n: int) -> AnnulusHarmonicCoeffs:
    """Coefficients of ``c1 |x|^{2-n} + c2`` equal to 1 on ``|x| = 1`` and ``a`` on ``|x| = r``."""
    _check_n(n)
    if not 0.0 < r < 1.0:
        raise ParameterError(f"need 0 < r < 1, got {r!r}")
    if not a > 0.0:
        raise ParameterError(f"need a > 0, got {a!r}")
    rn2 = r ** (n - 2)
    c1 = rn2 * (a - 1.0) / (1.0 - rn2)
    c2 = (1.0 - a * rn2) / (1.0 - rn2)
    return AnnulusHarmonicCoeffs(c1, c2, r, a, n)


def annulus_poisson_integral(r: float, a: float, n: int) -> float:
    """``int_{A_r} P_2 f dx = omega_n (n/2 c1 (1 - r^2) + c2 (1 - r^n))`` for two-level data."""
    c = annulus_harmonic_coeffs(r, a, n)
    return unit_ball_volume(n) * (0.5 * n * c.c1 * (1.0 - r * r) + c.c2 * (1.0 - r ** n))


def annulus_two_level_norm(r: float, a: float, n: int, p: float) -> float:
    """``L^p`` norm on the annulus boundary of data equal to 1 outside and ``a`` inside."""
    _check_n(n)
    return (sphere_area(n) * (1.0 + abs(a) ** p * r ** (n - 1))) ** (1.0 / p)


def annulus_C2_exact(r: float, n: int) -> float:
    """Closed form of ``C_2(A_r)``; ``r = 0`` gives ``C_2(B_1)``, the ball constant."""
    _check_n(n)
    if not 0.0 <= r < 1.0:
        raise ParameterError(f"need 0 <= r < 1, got {r!r}")
    lw = _log_omega(n)
    # numerator n w^2 (1 + (n/2) r^{n-1} - r^n - (n/2) r^{n+1}), written with expm1/log1p
    # so the tiny perturbation survives at small r
    pert = 0.5 * n * r ** (n - 1) * (1.0 - r * r) - r ** n
    log_num = math.log(n) + 2.0 * lw + math.log1p(pert)
    log_den = ((n + 2) / (2.0 * n)) * (lw + math.log1p(-r ** n)) \
        + (n / (2.0 * (n - 1))) * (math.log(n) + lw + math.log1p(r ** (n - 1)))
    return math.exp(log_num - log_den)


def annulus_C2_log_ratio(r: float, n: int) -> float:
    """``log(C_2(A_r) / C_2(B_1))`` computed without cancellation."""
    _check_n(n)
    pert = 0.5 * n * r ** (n - 1) * (1.0 - r * r) - r ** n
    return (math.log1p(pert) - ((n + 2) / (2.0 * n)) * math.log1p(-r ** n)
            - (n / (2.0 * (n - 1))) * math.log1p(r ** (n - 1)))


def c2_small_r_slope(n: int) -> float:
    """Leading coefficient of ``C_2(A_r)/C_2(B_1) - 1`` in powers of ``r^{n-1}``."""
    _check_n(n)
    return 0.5 * n - n / (2.0 * (n - 1))

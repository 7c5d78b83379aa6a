"""Rayleigh quotients compared against the ball's sharp constants."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .closed_forms import (
    boundary_exponent,
    critical_exponent,
    poisson_boundary_exponent,
    sharp_constant_ball,
    theta2_ball,
)
from .errors import DegenerateInputError, ParameterError, UnsupportedConfigurationError
from .geometry import DomainKind, DomainSpec, graded_volume_rule, sphere_area
from .operators import (
    BoundaryFunction,
    InteriorField,
    NormEstimate,
    harmonic_field,
    integrate_interior,
    lp_norm_boundary,
    lq_norm_interior,
    restrict_riesz,
    riesz_field,
)

VERDICT_FACTOR = 3.0


class Verdict(enum.Enum):
    EXCEEDS_BALL = "ExceedsBall"
    BELOW_BALL = "BelowBall"
    WITHIN_TOLERANCE = "WithinTolerance"


def classify(quotient: float, reference: float, error: float) -> Verdict:
    """Strict verdicts need a margin larger than ``VERDICT_FACTOR`` times the error."""
    margin = quotient - reference
    if margin > VERDICT_FACTOR * error:
        return Verdict.EXCEEDS_BALL
    if -margin > VERDICT_FACTOR * error:
        return Verdict.BELOW_BALL
    return Verdict.WITHIN_TOLERANCE


@dataclass(frozen=True)
class QuotientReport:
    numerator: float
    numerator_norm: str
    denominator: float
    denominator_norm: str
    quotient: float
    reference: float
    verdict: Verdict
    error: float
    tolerance_meta: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.quotient - self.reference


def make_report(num: NormEstimate | float, num_label: str, den: NormEstimate | float, den_label: str,
                reference: float, **meta) -> QuotientReport:
    num_v, num_e = (num.value, num.error) if isinstance(num, NormEstimate) else (float(num), 0.0)
    den_v, den_e = (den.value, den.error) if isinstance(den, NormEstimate) else (float(den), 0.0)
    if den_v == 0.0:
        raise DegenerateInputError("denominator vanishes")
    q = num_v / den_v
    # relative errors add; the floor covers rounding in the reference constant
    err = abs(q) * (num_e / abs(num_v) if num_v else 0.0) + abs(q) * den_e / abs(den_v) \
        + 16.0 * np.finfo(float).eps * max(abs(q), abs(reference))
    meta.update({"numerator_error": num_e, "denominator_error": den_e})
    return QuotientReport(num_v, num_label, den_v, den_label, q, reference, classify(q, reference, err), err, meta)


def _require_bounded(f: BoundaryFunction):
    if f.domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("quotients are defined on balls and annuli")
    if f.is_zero():
        raise DegenerateInputError("boundary data is identically zero")


def rayleigh_J2(f: BoundaryFunction, radial_order: int = 64, grading: float = 3.0) -> QuotientReport:
    """``||E_2 f||_{L^{2n/(n-2)}(Omega)} / ||f||_{L^{2(n-1)/n}(dOmega)}``."""
    _require_bounded(f)
    n = f.n
    q, p = critical_exponent(n), boundary_exponent(n)
    den = lp_norm_boundary(f, p)
    if den == 0.0:
        raise DegenerateInputError("boundary norm vanishes")
    num = lq_norm_interior(riesz_field(f, 2.0), q, radial_order=radial_order, grading=grading)
    return make_report(num, f"L^{q:g}(Omega) of E_2 f", den, f"L^{p:g}(dOmega) of f",
                       sharp_constant_ball(n), functional="J2")


def c2_functional(domain: DomainSpec, radial_order: int = 64, grading: float = 3.0) -> QuotientReport:
    """``|Omega|^{-(n+2)/(2n)} |dOmega|^{-n/(2(n-1))} int_Omega int_dOmega |x-y|^{2-n} dS_y dx``."""
    if domain.kind is DomainKind.HALF_SPACE_WINDOW:
        raise UnsupportedConfigurationError("C_2 is defined on balls and annuli")
    n = domain.n
    one = BoundaryFunction.constant(domain, 1.0)
    num = integrate_interior(riesz_field(one, 2.0), radial_order=radial_order, grading=grading)
    den = domain.volume() ** ((n + 2) / (2.0 * n)) * domain.boundary_area() ** (n / (2.0 * (n - 1)))
    return make_report(num, "double integral of |x-y|^{2-n}", den, "|Omega|^{(n+2)/2n} |dOmega|^{n/2(n-1)}",
                       sharp_constant_ball(n), functional="C2")


@dataclass(frozen=True)
class PoissonQuotient:
    """The norm quotient and its duality surrogate (pairing with the constant 1)."""

    full: QuotientReport
    surrogate: QuotientReport

    @property
    def quotient(self) -> float:
        return self.full.quotient


def poisson_quotient(f: BoundaryFunction, radial_order: int = 64, grading: float = 3.0) -> PoissonQuotient:
    """``||P_2 f||_{L^{2n/(n-2)}} / ||f||_{L^{2(n-1)/(n-2)}}`` and
    ``int P_2 f / (|Omega|^{(n+2)/(2n)} ||f||)``, both against ``Theta_2(B_1)``."""
    _require_bounded(f)
    n = f.n
    q, p = critical_exponent(n), poisson_boundary_exponent(n)
    den = lp_norm_boundary(f, p)
    if den == 0.0:
        raise DegenerateInputError("boundary norm vanishes")
    field_ = harmonic_field(f)
    ref = theta2_ball(n)
    num = lq_norm_interior(field_, q, radial_order=radial_order, grading=grading)
    full = make_report(num, f"L^{q:g}(Omega) of P_2 f", den, f"L^{p:g}(dOmega) of f", ref, functional="Theta2")
    total = integrate_interior(field_, radial_order=radial_order, grading=grading)
    vol = f.domain.volume() ** ((n + 2) / (2.0 * n))
    sur_den = NormEstimate(vol * den, 0.0)
    surrogate = make_report(total, "int_Omega P_2 f", sur_den, "|Omega|^{(n+2)/2n} ||f||", ref,
                            functional="Theta2-duality")
    return PoissonQuotient(full, surrogate)


def isoperimetric_conformal(f: BoundaryFunction, surrogate: bool = False, **kw) -> float:
    """Isoperimetric constant of ``g = (P_2 f)^{4/(n-2)} g_0``: the Poisson quotient to the ``2/(n-2)``.

    With ``surrogate=True`` the duality lower bound is used instead of the norm quotient.
    """
    _require_bounded(f)
    if f.is_radial:
        positive = np.all(f.component_values() > 0.0)
    else:
        fs = f.to_sampled()
        positive = all(np.all(v > 0.0) for v in fs.samples)
    if not positive:
        raise ParameterError("boundary data must be positive for a conformal metric")
    pq = poisson_quotient(f, **kw)
    rep = pq.surrogate if surrogate else pq.full
    return rep.quotient ** (2.0 / (f.n - 2))


# ------------------------------------------------------------- a-optimization

def default_a_grid(lo: float = 1.01, hi: float = 10.0, count: int = 25) -> np.ndarray:
    return np.geomspace(lo, hi, count)


@dataclass(frozen=True)
class TwoLevelOptimum:
    a: float
    report: QuotientReport
    grid: tuple
    grid_quotients: tuple


def _two_level_objective(domain, which, a, **kw):
    f = BoundaryFunction.two_level(domain, a)
    if which == "poisson-surrogate":
        return poisson_quotient(f, **kw).surrogate
    if which == "poisson":
        return poisson_quotient(f, **kw).full
    if which == "riesz":
        return rayleigh_J2(f, **kw)
    raise ParameterError(f"unknown objective {which!r}")


def optimize_two_level(domain: DomainSpec, which: str = "poisson-surrogate", a_grid=None, **kw) -> TwoLevelOptimum:
    """Best inner level ``a`` for two-level annulus data: log-grid scan, then golden-section refinement."""
    if domain.kind is not DomainKind.ANNULUS:
        raise UnsupportedConfigurationError("two-level data lives on an annulus")
    grid = np.asarray(default_a_grid() if a_grid is None else a_grid, dtype=float)
    if grid.size == 0:
        raise ParameterError("a-grid is empty")
    reports = [_two_level_objective(domain, which, a, **kw) for a in grid]
    vals = np.array([r.quotient for r in reports])
    k = int(np.argmax(vals))
    best_a, best = float(grid[k]), reports[k]
    if 0 < k < grid.size - 1:
        res = optimize.minimize_scalar(
            lambda la: -_two_level_objective(domain, which, math.exp(la), **kw).quotient,
            bracket=(math.log(grid[k - 1]), math.log(grid[k]), math.log(grid[k + 1])),
            method="golden", options={"xtol": 1e-6},
        )
        cand = _two_level_objective(domain, which, math.exp(res.x), **kw)
        if cand.quotient > best.quotient:
            best_a, best = math.exp(res.x), cand
    return TwoLevelOptimum(best_a, best, tuple(grid.tolist()), tuple(vals.tolist()))


@dataclass(frozen=True)
class DualityCheck:
    interior: float
    boundary: float

    @property
    def relative_gap(self) -> float:
        return abs(self.interior - self.boundary) / max(abs(self.interior), abs(self.boundary))


def duality_check(f: BoundaryFunction, g_radial, radial_order: int = 64, grading: float = 3.0) -> DualityCheck:
    """``<E_2 f, g>_Omega`` against ``<f, R_2 g>_dOmega`` for rotation-invariant ``f`` and ``g``."""
    _require_bounded(f)
    if not f.is_radial:
        raise UnsupportedConfigurationError("duality check takes per-sphere constant data")
    domain = f.domain
    rule = graded_volume_rule(domain, grading, (radial_order, 16))
    ext = riesz_field(f, 2.0)
    prod = InteriorField.from_radial(domain, lambda s: ext.radial(s) * np.asarray(g_radial(s)))
    lhs = integrate_interior(prod, rule=rule).value
    g = InteriorField.from_radial(domain, g_radial)
    rhs = 0.0
    for (_, rho), v in zip(domain.components, f.component_values()):
        y = np.zeros(domain.n)
        y[0] = rho
        rhs += float(v) * sphere_area(domain.n, rho) * restrict_riesz(g, 2.0, y, rule)
    return DualityCheck(float(lhs), float(rhs))

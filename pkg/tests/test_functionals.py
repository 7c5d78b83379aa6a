import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_ext.closed_forms import annulus_C2_exact, isoperimetric_ball, sharp_constant_ball, theta2_ball
from riesz_ext.errors import DegenerateInputError, ParameterError, UnsupportedConfigurationError
from riesz_ext.functionals import (
    VERDICT_FACTOR,
    Verdict,
    c2_functional,
    classify,
    duality_check,
    isoperimetric_conformal,
    make_report,
    optimize_two_level,
    poisson_quotient,
    rayleigh_J2,
)
from riesz_ext.geometry import DomainSpec
from riesz_ext.operators import BoundaryFunction, NormEstimate


def test_classify():
    assert classify(1.0 + 4e-3, 1.0, 1e-3) is Verdict.EXCEEDS_BALL
    assert classify(1.0 - 4e-3, 1.0, 1e-3) is Verdict.BELOW_BALL
    assert classify(1.0 + 2e-3, 1.0, 1e-3) is Verdict.WITHIN_TOLERANCE
    assert VERDICT_FACTOR == 3.0


def test_report_invariants():
    rep = make_report(NormEstimate(2.0, 1e-6), "num", 1.0, "den", 1.5)
    assert rep.margin == rep.quotient - rep.reference
    assert rep.verdict is classify(rep.quotient, rep.reference, rep.error)
    with pytest.raises(DegenerateInputError):
        make_report(1.0, "num", 0.0, "den", 1.0)


@pytest.mark.parametrize("n", [3, 4, 7])
def test_j2_constant_ball(n):
    rep = rayleigh_J2(BoundaryFunction.constant(DomainSpec.ball(n), 2.5))
    assert rep.quotient == pytest.approx(sharp_constant_ball(n), rel=1e-12)
    assert rep.verdict is Verdict.WITHIN_TOLERANCE


@settings(max_examples=10, deadline=None)
@given(a=st.floats(0.1, 10.0), lam=st.floats(0.01, 100.0))
def test_j2_homogeneous(a, lam):
    f = BoundaryFunction.two_level(DomainSpec.annulus(3, 0.2), a)
    assert rayleigh_J2(f.scaled(lam)).quotient == pytest.approx(rayleigh_J2(f).quotient, rel=1e-12)


@pytest.mark.parametrize("r", [1e-3, 0.1, 0.9])
def test_c2_matches_closed_form(r):
    rep = c2_functional(DomainSpec.annulus(3, r))
    assert rep.quotient == pytest.approx(annulus_C2_exact(r, 3), rel=1e-12)
    assert rep.verdict is (Verdict.BELOW_BALL if r == 0.9 else Verdict.EXCEEDS_BALL)


def test_c2_below_j2_of_constant():
    dom = DomainSpec.annulus(3, 0.2)
    assert c2_functional(dom).quotient <= rayleigh_J2(BoundaryFunction.constant(dom, 1.0)).quotient * (1 + 1e-12)


def test_poisson_on_ball():
    pq = poisson_quotient(BoundaryFunction.constant(DomainSpec.ball(4), 1.0))
    assert pq.quotient == pytest.approx(theta2_ball(4), rel=1e-12)
    assert pq.surrogate.quotient == pytest.approx(theta2_ball(4), rel=1e-12)


def test_surrogate_is_lower_bound():
    pq = poisson_quotient(BoundaryFunction.two_level(DomainSpec.annulus(3, 0.1), 2.0))
    assert pq.surrogate.quotient <= pq.full.quotient


def test_two_level_optimum_exceeds_theta2():
    opt = optimize_two_level(DomainSpec.annulus(3, 0.05), "poisson-surrogate", np.geomspace(1.01, 10, 13))
    assert opt.report.verdict is Verdict.EXCEEDS_BALL
    assert opt.report.quotient >= max(opt.grid_quotients)
    assert 1.5 < opt.a < 3.5


def test_isoperimetric_conformal():
    f = BoundaryFunction.two_level(DomainSpec.annulus(3, 0.05), 2.2)
    assert isoperimetric_conformal(f) > isoperimetric_ball(3)
    assert isoperimetric_conformal(BoundaryFunction.constant(DomainSpec.ball(3), 1.0)) == pytest.approx(
        isoperimetric_ball(3), rel=1e-12)
    with pytest.raises(ParameterError):
        isoperimetric_conformal(BoundaryFunction.two_level(DomainSpec.annulus(3, 0.05), -1.0))


def test_functional_errors():
    with pytest.raises(DegenerateInputError):
        rayleigh_J2(BoundaryFunction.constant(DomainSpec.ball(3), 0.0))
    with pytest.raises(UnsupportedConfigurationError):
        c2_functional(DomainSpec.half_space_window(3, 5.0))
    with pytest.raises(UnsupportedConfigurationError):
        optimize_two_level(DomainSpec.ball(3))
    with pytest.raises(ParameterError):
        optimize_two_level(DomainSpec.annulus(3, 0.1), "bogus", [1.0, 2.0])


def test_duality_closed_form():
    chk = duality_check(BoundaryFunction.constant(DomainSpec.ball(3), 1.0), lambda s: np.ones_like(s))
    assert chk.interior == pytest.approx(16 * math.pi ** 2 / 3, rel=1e-13)
    assert chk.relative_gap < 1e-12

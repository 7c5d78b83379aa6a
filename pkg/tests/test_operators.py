import math

import numpy as np
import pytest

from riesz_ext.closed_forms import (
    BubbleParams,
    annulus_harmonic_coeffs,
    annulus_two_level_norm,
    bubble_boundary_norm,
    bubble_f_radial,
    bubble_tail_power,
)
from riesz_ext.errors import (
    DomainError,
    EvaluationError,
    ParameterError,
    UnsupportedConfigurationError,
)
from riesz_ext.geometry import DomainSpec, sphere_area, surface_grid, unit_ball_volume
from riesz_ext.operators import (
    BoundaryFunction,
    InteriorField,
    Representation,
    extend_riesz,
    harmonic_extend,
    integrate_boundary,
    integrate_interior,
    lp_norm_boundary,
    lq_norm_interior,
    radial_power_whole_space,
    radial_profile_tail_power,
    restrict_riesz,
    riesz_field,
)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_constant_extension_ball(n):
    f = BoundaryFunction.constant(DomainSpec.ball(n), 1.0)
    x = np.zeros((4, n))
    x[:, 0] = [0.0, 0.3, 0.9, 0.999]
    assert np.allclose(extend_riesz(f, 2.0, x), sphere_area(n), rtol=1e-12)


@pytest.mark.parametrize("n", [3, 5])
def test_two_level_extension_annulus(n):
    r, a = 0.25, 3.0
    f = BoundaryFunction.two_level(DomainSpec.annulus(n, r), a)
    s = np.array([0.3, 0.6, 0.99])
    x = np.zeros((3, n))
    x[:, -1] = s
    exact = sphere_area(n) + a * sphere_area(n) * r ** (n - 1) / s ** (n - 2)
    assert np.allclose(extend_riesz(f, 2.0, x), exact, rtol=1e-12)


def test_linear_data_extension_funk_hecke():
    # degree-one harmonic: int_{S^2} y_3 |x - y|^{-1} dS = (4 pi / 3) x_3 inside the ball
    f = BoundaryFunction.closed_form(DomainSpec.ball(3), lambda p, c: p[:, -1])
    x = np.array([0.1, 0.2, 0.5])
    assert extend_riesz(f, 2.0, x) == pytest.approx(4 * math.pi / 3 * 0.5, rel=1e-10)


def test_sampled_grid_near_boundary():
    ball = DomainSpec.ball(3)
    g = surface_grid(1.0, 24)
    f = BoundaryFunction.sampled(ball, [g], [np.ones(len(g))])
    x = np.array([[0.0, 0.0, 0.2], [0.9995, 0.0, 0.0], [0.3, 0.4, 0.5]])
    assert np.allclose(extend_riesz(f, 2.0, x), 4 * math.pi, rtol=1e-10)


def test_general_alpha():
    # alpha = 1 + 1/2 in n = 3: constant data, centre of the ball gives |S^2| * 1^{alpha - n}
    f = BoundaryFunction.constant(DomainSpec.ball(3), 1.0)
    assert extend_riesz(f, 1.5, np.zeros(3)) == pytest.approx(4 * math.pi, rel=1e-13)


def test_extension_errors():
    f = BoundaryFunction.constant(DomainSpec.ball(3), 1.0)
    with pytest.raises(ParameterError):
        extend_riesz(f, 3.0, np.zeros(3))
    with pytest.raises(ParameterError):
        extend_riesz(f, 1.0, np.zeros(3))
    with pytest.raises(DomainError):
        extend_riesz(f, 2.0, np.array([1.0, 0.0, 0.0]))


def test_scaled_and_zero():
    dom = DomainSpec.annulus(3, 0.5)
    f = BoundaryFunction.two_level(dom, 2.0)
    assert f.scaled(3.0).component_values().tolist() == [3.0, 6.0]
    assert BoundaryFunction.constant(dom, 0.0).is_zero()
    assert f.representation is Representation.COMPONENT_CONSTANT


def test_harmonic_extension_ball_and_annulus():
    ball = DomainSpec.ball(3)
    assert harmonic_extend(BoundaryFunction.constant(ball, 2.0), np.array([0.1, 0.2, 0.3])) == pytest.approx(2.0)
    lin = BoundaryFunction.closed_form(ball, lambda p, c: p[:, -1])
    assert harmonic_extend(lin, np.array([0.0, 0.0, 0.4])) == pytest.approx(0.4, rel=1e-8)
    ann = DomainSpec.annulus(3, 0.1)
    c = annulus_harmonic_coeffs(0.1, 2.0, 3)
    assert harmonic_extend(BoundaryFunction.two_level(ann, 2.0), np.array([0.5, 0, 0])) == pytest.approx(c(0.5))


def test_restriction_constant_is_newton_potential():
    for n in (3, 4, 6):
        g = InteriorField.from_radial(DomainSpec.ball(n), lambda s: np.ones_like(s))
        y = np.zeros(n)
        y[0] = 1.0
        assert restrict_riesz(g, 2.0, y) == pytest.approx(unit_ball_volume(n), rel=1e-12)


def test_restriction_dipole_n3():
    # density x_3 on the ball seen from the north pole: int x_3^2 dx = 4 pi / 15
    g = InteriorField(lambda p: p[:, -1], DomainSpec.ball(3))
    assert restrict_riesz(g, 2.0, np.array([0.0, 0.0, 1.0])) == pytest.approx(4 * math.pi / 15, rel=1e-4)


def test_restriction_off_boundary_rejected():
    g = InteriorField.from_radial(DomainSpec.ball(3), lambda s: s)
    with pytest.raises(DomainError):
        restrict_riesz(g, 2.0, np.array([0.5, 0.0, 0.0]))


def test_nan_profile_reports_node():
    g = InteriorField.from_radial(DomainSpec.ball(3), lambda s: np.where(s > 0.5, np.nan, 1.0))
    with pytest.raises(EvaluationError) as info:
        integrate_interior(g)
    assert info.value.node is not None


def test_boundary_norms():
    dom = DomainSpec.annulus(4, 0.3)
    f = BoundaryFunction.two_level(dom, 2.0)
    assert lp_norm_boundary(f, 1.5) == pytest.approx(annulus_two_level_norm(0.3, 2.0, 4, 1.5), rel=1e-14)
    assert integrate_boundary(f) == pytest.approx(sphere_area(4) * (1 + 2 * 0.3 ** 3), rel=1e-14)
    with pytest.raises(ParameterError):
        lp_norm_boundary(f, 0.5)


def test_interior_integrals():
    dom = DomainSpec.ball(5)
    g = InteriorField.from_radial(dom, lambda s: s * s)
    est = integrate_interior(g)
    assert est.value == pytest.approx(sphere_area(5) / 7, rel=1e-13)
    assert est.error < 1e-12
    nrm = lq_norm_interior(riesz_field(BoundaryFunction.constant(dom, 1.0)), 10 / 3)
    assert nrm.value == pytest.approx(sphere_area(5) * unit_ball_volume(5) ** 0.3, rel=1e-13)


def test_bubble_window_norm_and_tail():
    n, R = 3, 50.0
    prm = BubbleParams(1.0, n)
    f = BoundaryFunction.radial(DomainSpec.half_space_window(n, R), lambda s, c: bubble_f_radial(prm, s), (1.0,))
    inside = lp_norm_boundary(f, 4 / 3) ** (4 / 3)
    tail = radial_profile_tail_power(lambda s: bubble_f_radial(prm, s), n, 4 / 3, R)
    assert tail == pytest.approx(bubble_tail_power(1.0, R, n), rel=1e-10)
    assert inside + tail == pytest.approx(bubble_boundary_norm(n) ** (4 / 3), rel=1e-12)
    whole = radial_power_whole_space(lambda s: bubble_f_radial(prm, s), n, 4 / 3)
    assert whole == pytest.approx(bubble_boundary_norm(n) ** (4 / 3), rel=1e-13)


def test_window_rejects_non_radial():
    dom = DomainSpec.half_space_window(3, 10.0)
    with pytest.raises(UnsupportedConfigurationError):
        integrate_boundary(BoundaryFunction.constant(dom, 1.0))

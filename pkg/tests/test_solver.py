import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riesz_ext.closed_forms import sharp_constant_ball
from riesz_ext.errors import DegenerateInputError, ParameterError, UnsupportedConfigurationError
from riesz_ext.geometry import DomainSpec
from riesz_ext.operators import BoundaryFunction, extend_riesz
from riesz_ext.solver import (
    SolverConfig,
    ZonalDiscretization,
    continuation_to_critical,
    el_step,
    holder_bound_ball,
    solve_subcritical,
)

BALL3 = DomainSpec.ball(3)


def test_zonal_extension_matches_direct_quadrature():
    dom = DomainSpec.annulus(3, 0.3)
    disc = ZonalDiscretization(dom, 6)
    f = BoundaryFunction.closed_form(dom, lambda p, c: 1 + p[:, -1] ** 2 if c == "outer" else 2 + 0 * p[:, -1])
    v = disc.extend(disc.sample(f))
    for i, j in [(5, 0), (20, 2), (60, 5)]:
        rho, t = disc.rule.nodes[i], disc.t[j]
        x = np.array([rho * math.sqrt(1 - t * t), 0.0, rho * t])
        assert v[i * 6 + j] == pytest.approx(extend_riesz(f, 2.0, x), rel=1e-10)


@pytest.mark.parametrize("n,N", [(3, 5), (5, 4)])
def test_discrete_adjointness(n, N):
    disc = ZonalDiscretization(DomainSpec.annulus(n, 0.4), N, radial_order=16)
    rng = np.random.default_rng(7)
    f = rng.random(disc.boundary_size)
    g = rng.random(disc.kernel.shape[0])
    lhs = np.dot(disc.volume_weights * disc.extend(f), g)
    rhs = np.dot(disc.boundary_weights * f, disc.restrict(g))
    assert lhs == pytest.approx(rhs, rel=1e-13)


@pytest.mark.parametrize("q", [3.0, 4.0, 5.0, 5.9])
def test_ball_constant_fixed_point(q):
    f = BoundaryFunction.constant(BALL3, 1.0)
    disc = ZonalDiscretization(BALL3, 4)
    out = disc.sample(el_step(f, q, disc))
    base = disc.normalize(disc.sample(f))
    assert np.max(np.abs(out - base)) / np.max(base) <= 1e-12


def test_q3_single_step_value():
    rep = solve_subcritical(BALL3, SolverConfig(q=3.0))
    w = 4 * math.pi / 3
    assert rep.converged and rep.iterations == 1
    assert rep.quotient == pytest.approx(4 * math.pi * w ** (1 / 3) / (4 * math.pi) ** 0.75, rel=1e-13)
    assert rep.meta["holder_ok"]


def test_config_validation():
    for bad in (dict(q=2.0), dict(q=6.0), dict(q=3.0, damping=0.0), dict(q=3.0, tol=0.0), dict(q=3.0, max_iter=0)):
        with pytest.raises(ParameterError):
            solve_subcritical(BALL3, SolverConfig(**bad))
    with pytest.raises(UnsupportedConfigurationError):
        ZonalDiscretization(DomainSpec.half_space_window(3, 2.0))


def test_el_step_rejects_bad_data():
    with pytest.raises(DegenerateInputError):
        el_step(BoundaryFunction.constant(BALL3, 0.0), 4.0)
    with pytest.raises(ParameterError):
        el_step(BoundaryFunction.constant(BALL3, -1.0), 4.0)
    with pytest.raises(ParameterError):
        el_step(BoundaryFunction.constant(BALL3, 1.0), 7.0)


@settings(max_examples=8, deadline=None)
@given(seed=st.integers(0, 10_000), q=st.floats(2.5, 5.9), damping=st.floats(0.3, 1.0))
def test_history_monotone_from_random_start(seed, q, damping):
    disc = ZonalDiscretization(DomainSpec.annulus(3, 0.2), 6, radial_order=32)
    init = np.random.default_rng(seed).random(disc.boundary_size) + 0.01
    rep = solve_subcritical(disc.domain, SolverConfig(q=q, damping=damping, radial_order=32), init, disc)
    h = np.array(rep.quotient_history)
    assert np.all(np.diff(h) >= -1e-12 * h[:-1])


def test_random_ball_start_converges_to_constant():
    disc = ZonalDiscretization(BALL3, 8)
    init = np.random.default_rng(0).random(8) + 0.1
    rep = solve_subcritical(BALL3, SolverConfig(q=4.0, angular_nodes=8), init, disc)
    assert rep.converged
    assert np.ptp(rep.final_values) / rep.final_values.mean() < 1e-6
    assert rep.quotient <= holder_bound_ball(3, 4.0)


def test_non_convergence_is_reported():
    disc = ZonalDiscretization(BALL3, 6)
    init = np.random.default_rng(3).random(6) + 0.05
    rep = solve_subcritical(BALL3, SolverConfig(q=5.0, max_iter=1, angular_nodes=6), init, disc)
    assert not rep.converged
    assert len(rep.quotient_history) == 2


def test_final_function_interpolates_nodes():
    disc = ZonalDiscretization(DomainSpec.annulus(3, 0.3), 5)
    rep = solve_subcritical(disc.domain, SolverConfig(q=4.5, angular_nodes=5), disc=disc)
    assert np.allclose(disc.sample(rep.final_f), rep.final_values, rtol=1e-12)


def test_continuation_on_ball():
    res = continuation_to_critical(BALL3, [4.0, 5.0, 5.5, 5.9, 5.99], SolverConfig(q=4.0))
    assert not res.tentative
    assert res.entries[-1][1] == pytest.approx(sharp_constant_ball(3), rel=1e-2)
    assert res.extrapolated == pytest.approx(sharp_constant_ball(3), rel=1e-4)
    with pytest.raises(ParameterError):
        continuation_to_critical(BALL3, [5.0, 4.0], SolverConfig(q=4.0))
    with pytest.raises(ParameterError):
        continuation_to_critical(BALL3, [4.0, 6.0], SolverConfig(q=4.0))


def test_continuation_flags_tentative():
    res = continuation_to_critical(BALL3, [4.0, 5.0], SolverConfig(q=4.0, max_iter=1, angular_nodes=6),
                                   init=np.random.default_rng(1).random(6) + 0.05)
    assert res.tentative


def test_annulus_exceeds_ball_baseline():
    dom = DomainSpec.annulus(3, 0.05)
    rep = solve_subcritical(dom, SolverConfig(q=5.9))
    baseline = sharp_constant_ball(3) * dom.volume() ** (1 / 5.9 - 1 / 6)
    assert rep.converged and rep.quotient > baseline

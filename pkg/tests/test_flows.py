import math

import numpy as np
import pytest

from qneclab.fields import make_bump, make_cos2
from qneclab.flows import (
    FlowConfig,
    closed_form_flow,
    exponentiate,
    flow_jet,
    inverse_flow,
)

from conftest import bump_sum, constant_window_field


class TestExponentiate:
    def test_zero_time_is_identity(self, rng):
        rho = exponentiate(bump_sum(rng), 0.0)
        us = rng.uniform(-3, 3, 20)
        rows = rho.jets(us)
        assert np.all(rows[:, 0] == us)
        assert np.all(rows[:, 1] == 1.0)

    def test_constant_field_translates(self):
        field = constant_window_field(1.0, 5.0)
        rho = exponentiate(field, 0.3)
        assert rho(0.0) == pytest.approx(0.3, abs=1e-11)
        assert rho(-1.2) == pytest.approx(-0.9, abs=1e-11)

    def test_cos2_closed_form(self):
        rho = exponentiate(make_cos2(), 1.0)
        u = 0.2
        assert rho(u) == pytest.approx(math.atan(math.tan(u) + 1.0), abs=1e-9)

    def test_failure_reports_context(self):
        # trajectory hits a square-root singularity of the field inside the
        # declared support; the integrator cannot cross it and must report
        from qneclab.fields import VectorField
        from qneclab.flows import FlowError

        def jet_fn(us):
            with np.errstate(invalid="ignore"):
                f = np.sqrt(1.0 - us)
                d1 = -0.5 / np.sqrt(1.0 - us)
            z = np.zeros_like(us)
            return f, d1, z, z.copy()

        singular = VectorField(picture="line", support=(-5.0, 5.0),
                               _jet_fn=jet_fn, label="sqrt-singular")
        with pytest.raises(FlowError):
            exponentiate(singular, 4.0).jet_at(0.9)


class TestFlowJet:
    def test_time_zero(self):
        jet = flow_jet(make_cos2(), 0.0, 0.4)
        assert (jet.value, jet.d1, jet.d2, jet.d3) == (0.4, 1.0, 0.0, 0.0)

    def test_cos2_log_derivative(self):
        jet = flow_jet(make_cos2(), 1.0, 0.0)
        assert jet.d2 / jet.d1 == pytest.approx(-1.0, abs=1e-9)

    def test_cos2_first_derivative(self):
        # transport identity: rho'(0) = f(rho(0))/f(0) = cos^2(pi/4) = 1/2
        jet = flow_jet(make_cos2(), 1.0, 0.0)
        assert jet.d1 == pytest.approx(0.5, abs=1e-10)

    def test_exceptional_point_one_sided_jets(self):
        # the support endpoint is a fixed point; transported jets use the
        # one-sided field jets, giving rho''(pi/2) = f''(pi/2-) * t = 2
        jet = flow_jet(make_cos2(), 1.0, math.pi / 2)
        assert jet.value == pytest.approx(math.pi / 2, abs=1e-12)
        assert jet.d1 == pytest.approx(1.0, abs=1e-10)
        assert jet.d2 == pytest.approx(2.0, abs=1e-8)


class TestClosedFormFlow:
    def test_cos2_quadrature_inverse(self):
        assert closed_form_flow(make_cos2(), 1.0, 0.0) == pytest.approx(
            math.pi / 4, abs=1e-10)

    def test_zero_time(self):
        assert closed_form_flow(make_bump(0, 1, 1), 0.0, 0.2) == 0.2

    def test_agrees_with_ode(self):
        field = make_bump(0.0, 1.0, 1.0)
        ode = exponentiate(field, 0.1)(0.2)
        assert closed_form_flow(field, 0.1, 0.2) == pytest.approx(ode, abs=1e-8)

    def test_negative_amplitude_and_time(self, rng):
        field = make_bump(0.3, 0.9, -0.6)
        for t in (-0.4, 0.25):
            u = 0.1
            assert closed_form_flow(field, t, u) == pytest.approx(
                exponentiate(field, t)(u), abs=1e-9)

    def test_vanishing_field_rejected(self):
        with pytest.raises(ValueError):
            closed_form_flow(make_bump(0, 1, 1), 0.5, 3.0)


class TestInverseFlow:
    def test_zero_time_identity(self):
        eta = inverse_flow(make_cos2(), 0.0)
        assert eta(0.7) == 0.7

    def test_inverts_closed_form(self):
        eta = inverse_flow(make_cos2(), 1.0)
        assert eta(math.pi / 4) == pytest.approx(0.0, abs=1e-9)

    def test_round_trip(self, rng):
        field = bump_sum(rng)
        rho = exponentiate(field, 0.5)
        eta = inverse_flow(field, 0.5)
        us = rng.uniform(-3.0, 3.0, 100)
        resid = np.abs(eta.values(rho.values(us)) - us)
        assert resid.max() < 1e-8


class TestInvariants:
    def test_group_law(self, rng):
        for _ in range(3):
            field = bump_sum(rng)
            s, t = rng.uniform(-1.0, 1.0, 2)
            us = rng.uniform(-3.0, 3.0, 50)
            lhs = exponentiate(field, s + t).values(us)
            rhs = exponentiate(field, s).values(exponentiate(field, t).values(us))
            assert np.max(np.abs(lhs - rhs)) < 1e-8

    def test_derivative_transport(self, rng):
        field = bump_sum(rng)
        rho = exponentiate(field, 0.8)
        us = rng.uniform(*field.support, 60)
        f_at = field.jets(us)[0]
        keep = np.abs(f_at) > 1e-6
        rows = rho.jets(us[keep])
        f_img = field.jets(rows[:, 0])[0]
        assert np.max(np.abs(rows[:, 1] - f_img / f_at[keep])) < 1e-8

    def test_orientation(self, rng):
        field = bump_sum(rng)
        rho = exponentiate(field, 1.0)
        us = np.linspace(field.support[0], field.support[1], 200)
        assert np.all(rho.jets(us)[:, 1] > 0.0)


class TestFlowConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            FlowConfig(abs_tol=-1.0)
        with pytest.raises(ValueError):
            FlowConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            FlowConfig(max_step=-0.1)
        with pytest.raises(ValueError):
            FlowConfig(method="euler")

    def test_default_method_is_embedded_rk(self):
        assert FlowConfig().method == "adaptive-embedded-runge-kutta"

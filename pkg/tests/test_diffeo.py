import math

import numpy as np
import pytest

from qneclab.diffeo import (
    AffineMap,
    ExplicitMap,
    Jet3,
    RotationMap,
    compose,
    identity,
    invert,
    log_derivative_ratio,
    moebius_fixing,
    schwarzian,
    schwarzian_array,
)
from qneclab.flows import exponentiate
from qneclab.fields import make_bump, make_cos2

from conftest import bump_sum


def arctan_shift_map():
    """u -> arctan(tan u + 1) on (-pi/2, pi/2), identity outside."""
    def jet_fn(us):
        rows = np.empty((us.size, 4))
        inside = np.abs(us) < np.pi / 2
        rows[:, 0] = us
        rows[:, 1] = 1.0
        rows[:, 2] = 0.0
        rows[:, 3] = 0.0
        u = us[inside]
        t = np.tan(u)
        s2 = 1.0 + t * t
        g = t + 1.0
        w = 1.0 + g * g
        gp = s2
        gpp = 2.0 * s2 * t
        gppp = 2.0 * s2 * (s2 + 2.0 * t * t)
        rows[inside, 0] = np.arctan(g)
        rows[inside, 1] = gp / w
        rows[inside, 2] = gpp / w - 2.0 * g * gp**2 / w**2
        rows[inside, 3] = (gppp / w - (2.0 * gp**3 + 6.0 * g * gp * gpp) / w**2
                           + 8.0 * g * g * gp**3 / w**3)
        return rows

    return ExplicitMap(jet_fn, curvature_support=(-np.pi / 2, np.pi / 2),
                       breakpoints=(-np.pi / 2, np.pi / 2), label="arctan-shift")


class TestJet3:
    def test_orientation_enforced(self):
        with pytest.raises(ValueError):
            Jet3(0.0, -1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            Jet3(0.0, math.nan, 0.0, 0.0)
        assert Jet3(1.0, 2.0, -3.0, 4.0).d1 == 2.0


class TestCompose:
    def test_identity_neutral(self, rng):
        rho = exponentiate(bump_sum(rng), 0.7)
        both = compose(identity(), rho)
        us = rng.uniform(-3.0, 3.0, 30)
        assert np.max(np.abs(both.jets(us) - rho.jets(us))) < 1e-14

    def test_affine_closed_form(self):
        a = AffineMap(2.0, 1.0)
        b = AffineMap(0.5, -3.0)
        ab = compose(a, b)
        assert isinstance(ab, AffineMap)
        assert ab.m == pytest.approx(1.0)
        assert ab.q == pytest.approx(2.0 * (-3.0) + 1.0)

    def test_composition_with_inverse_is_identity(self, rng):
        rho = exponentiate(bump_sum(rng), 0.9)
        eta = invert(rho)
        round_trip = compose(rho, eta)
        us = rng.uniform(-3.0, 3.0, 50)
        rows = round_trip.jets(us)
        ident = np.stack([us, np.ones_like(us), np.zeros_like(us),
                          np.zeros_like(us)], axis=1)
        assert np.max(np.abs(rows - ident)) < 1e-8

    def test_picture_mismatch(self):
        with pytest.raises(ValueError):
            compose(AffineMap(1.0, 0.0), RotationMap(0.3))

    def test_chain_rule_against_finite_differences(self, rng):
        rho = exponentiate(bump_sum(rng), 0.8)
        sig = exponentiate(bump_sum(rng), -0.5)
        both = compose(rho, sig)
        u = 0.37
        h = 1e-4
        vals = [both(u + k * h) for k in (-1, 0, 1)]
        jet = both.jet_at(u)
        assert jet.d1 == pytest.approx((vals[2] - vals[0]) / (2 * h), abs=1e-7)
        assert jet.d2 == pytest.approx(
            (vals[2] - 2 * vals[1] + vals[0]) / h**2, abs=1e-4)


class TestInvert:
    def test_identity(self):
        inv = invert(identity())
        assert inv(1.234) == pytest.approx(1.234)

    def test_closed_form_flow_pair(self):
        rho = arctan_shift_map()
        eta = invert(rho, -2.0, 2.0)
        assert eta(np.pi / 4) == pytest.approx(0.0, abs=1e-12)

    def test_affine(self):
        inv = invert(AffineMap(2.0, 1.0))
        assert isinstance(inv, AffineMap)
        assert inv(5.0) == pytest.approx(2.0)

    def test_inverse_jets(self):
        rho = arctan_shift_map()
        eta = invert(rho, -2.0, 2.0)
        jet = eta.jet_at(np.pi / 4)
        # eta'(pi/4) = 1/rho'(0) = 2
        assert jet.d1 == pytest.approx(2.0, abs=1e-10)
        # eta''/eta' = -rho''/rho'^2 at the preimage: -(-1)/0.5 = 2... via
        # the inverse rule eta'' = -rho''(0)/rho'(0)^3 = -(-1/2)/(1/8) = 4
        assert jet.d2 == pytest.approx(4.0, abs=1e-9)

    def test_nonmonotone_detected(self):
        def jet_fn(us):
            rows = np.empty((us.size, 4))
            rows[:, 0] = np.sin(us)          # not increasing on wide brackets
            rows[:, 1] = np.cos(us)
            rows[:, 2] = -np.sin(us)
            rows[:, 3] = -np.cos(us)
            return rows

        wiggle = ExplicitMap(jet_fn, label="sin")
        with pytest.raises(ValueError):
            invert(wiggle, -3.0, 3.0)(0.2)


class TestMoebiusFixing:
    def test_identity_case(self):
        m = moebius_fixing(0.0, 3.0, 0.0, 3.0)
        assert (m.m, m.q) == (1.0, 0.0)

    def test_two_point_interpolation(self):
        m = moebius_fixing(0.0, 1.0, 2.0, 4.0)
        assert m(2.0) == pytest.approx(0.0)
        assert m(4.0) == pytest.approx(1.0)
        assert m.m == pytest.approx(0.5)

    def test_fixes_endpoints_through_composition(self, rng):
        # rho(alpha(a)) = a and rho(alpha(b)) = b for alpha: a -> eta(a), b -> eta(b)
        rho = exponentiate(bump_sum(rng), 1.0)
        a, b = -2.5, 2.5
        eta = invert(rho)
        alpha = moebius_fixing(eta(a), eta(b), a, b)
        composed = compose(rho, alpha)
        assert composed(a) == pytest.approx(a, abs=1e-9)
        assert composed(b) == pytest.approx(b, abs=1e-9)

    def test_degenerate(self):
        with pytest.raises(ValueError):
            moebius_fixing(0.0, 1.0, 2.0, 2.0)


class TestSchwarzian:
    def test_affine_zero(self, rng):
        m = AffineMap(rng.uniform(0.2, 3.0), rng.uniform(-2, 2))
        for u in rng.uniform(-5, 5, 10):
            assert schwarzian(m, float(u)) == 0.0

    def test_chain_rule_on_flows(self, rng):
        for _ in range(5):
            rho = exponentiate(bump_sum(rng), 0.7)
            sig = exponentiate(bump_sum(rng), -0.6)
            both = compose(rho, sig)
            us = rng.uniform(-3.0, 3.0, 40)
            rows = sig.jets(us)
            expected = (rows[:, 1] ** 2 * schwarzian_array(rho, rows[:, 0])
                        + schwarzian_array(sig, us))
            assert np.max(np.abs(schwarzian_array(both, us) - expected)) < 1e-8

    def test_against_finite_difference_schwarzian(self):
        rho = arctan_shift_map()

        def fd_schwarzian(u, h):
            vals = np.array([rho(u + k * h) for k in (-2, -1, 0, 1, 2)])
            d1 = (vals[3] - vals[1]) / (2 * h)
            d2 = (vals[3] - 2 * vals[2] + vals[1]) / h**2
            d3 = (vals[4] - 2 * vals[3] + 2 * vals[1] - vals[0]) / (2 * h**3)
            return d3 / d1 - 1.5 * (d2 / d1) ** 2

        # 5-point stencil plus one Richardson halving; h large enough that
        # third-difference roundoff (eps/h^3) stays below the 1e-6 target
        h = 1e-2
        fd = (4.0 * fd_schwarzian(0.0, h / 2) - fd_schwarzian(0.0, h)) / 3.0
        assert schwarzian(rho, 0.0) == pytest.approx(fd, abs=1e-6)
        assert schwarzian(rho, 0.0) == pytest.approx(1.5, abs=1e-14)


class TestLogDerivativeRatio:
    def test_identity_and_affine(self):
        assert log_derivative_ratio(identity(), 0.3) == 0.0
        assert log_derivative_ratio(AffineMap(2.0, -1.0), 0.3) == 0.0

    def test_cos2_flow_value(self):
        rho = exponentiate(make_cos2(), 1.0)
        assert log_derivative_ratio(rho, 0.0) == pytest.approx(-1.0, abs=1e-9)


def test_flow_is_identity_outside_support_exactly(rng):
    field = make_bump(0.5, 1.0, 0.4)
    rho = exponentiate(field, 1.3)
    us = np.array([-2.0, -0.51, 1.51, 4.0])
    rows = rho.jets(us)
    assert np.all(rows[:, 0] == us)
    assert np.all(rows[:, 1] == 1.0)
    assert np.all(rows[:, 2:] == 0.0)

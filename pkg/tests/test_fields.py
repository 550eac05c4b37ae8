import math

import numpy as np
import pytest

from qneclab.fields import (
    cayley_pushforward,
    combine,
    eval_jet,
    field_from_spec,
    make_bump,
    make_cos2,
    make_trigpoly,
    sobolev_norm,
    zero_field,
)


def bump_reference(u, center, halfwidth, amplitude):
    """Independently coded closed form of the bump (value only)."""
    x = (u - center) / halfwidth
    if abs(x) >= 1.0:
        return 0.0
    return amplitude * math.exp(1.0 - 1.0 / (1.0 - x * x))


class TestBump:
    def test_symmetric_maximum(self):
        f = make_bump(0.0, 1.0, 1.0)
        val, d1 = eval_jet(f, 0.0, 1)
        assert val == pytest.approx(1.0, abs=1e-15)
        assert d1 == pytest.approx(0.0, abs=1e-15)

    def test_outside_support_zero(self):
        f = make_bump(0.0, 1.0, 1.0)
        assert eval_jet(f, 1.5, 3) == (0.0, 0.0, 0.0, 0.0)

    def test_against_independent_formula(self):
        f = make_bump(2.0, 0.5, -0.3)
        assert f(2.1) == pytest.approx(bump_reference(2.1, 2.0, 0.5, -0.3),
                                       abs=1e-14)

    @pytest.mark.parametrize("u", [-0.7, -0.2, 0.15, 0.6])
    def test_jets_match_finite_differences(self, u):
        f = make_bump(0.0, 1.0, 0.8)
        _, d1, d2, d3 = f.jet(u)
        h = 1e-6
        assert d1 == pytest.approx((f(u + h) - f(u - h)) / (2 * h), abs=1e-7)
        h = 1e-4
        assert d2 == pytest.approx(
            (f(u + h) - 2 * f(u) + f(u - h)) / h**2, abs=1e-5)
        # third differences need a large step to beat roundoff, plus one
        # Richardson halving to kill the h^2 truncation term
        def fd3(step):
            return (f(u + 2 * step) - 2 * f(u + step)
                    + 2 * f(u - step) - f(u - 2 * step)) / (2 * step**3)

        h = 5e-3
        richardson = (4.0 * fd3(h / 2) - fd3(h)) / 3.0
        assert d3 == pytest.approx(richardson, rel=2e-4, abs=1e-5)

    def test_jet_frozen_symbolic_values(self):
        # reference jet computed by symbolic differentiation of the closed form
        jet = make_bump(0.0, 1.0, 0.8).jet(-0.2)
        assert jet == pytest.approx((0.7673515656873106, 0.3330518948295619,
                                     -1.798248946041558, 2.0431270542372184),
                                    rel=1e-13)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            make_bump(0.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            make_bump(math.nan, 1.0, 1.0)


class TestCos2:
    def test_jet_at_zero(self):
        f = make_cos2()
        assert f.jet(0.0) == pytest.approx((1.0, 0.0, -2.0, 0.0), abs=1e-15)

    def test_c1_gluing_at_edges(self):
        f = make_cos2()
        val, d1 = eval_jet(f, math.pi / 2, 1)
        assert val == pytest.approx(0.0, abs=1e-15)
        assert d1 == pytest.approx(0.0, abs=1e-12)
        # one-sided second derivative from inside the support
        assert f.jet(math.pi / 2)[2] == pytest.approx(2.0, abs=1e-12)
        assert f.jet_discontinuous_at(math.pi / 2)
        assert not f.jet_discontinuous_at(0.3)

    def test_outside_support(self):
        assert make_cos2()(2.0) == 0.0


class TestEvalJet:
    def test_order_validation(self):
        f = make_cos2()
        with pytest.raises(ValueError):
            eval_jet(f, 0.0, 4)
        assert eval_jet(f, 0.0, 1) == pytest.approx((1.0, 0.0))

    def test_outside_support_zeros(self):
        f = make_bump(0.0, 1.0, 1.0)
        assert eval_jet(f, 7.0, 3) == (0.0, 0.0, 0.0, 0.0)

    def test_matches_closed_form(self):
        f = make_bump(0.0, 1.0, 1.0)
        assert eval_jet(f, 0.5, 0)[0] == pytest.approx(
            bump_reference(0.5, 0.0, 1.0, 1.0), abs=1e-15)


class TestCombine:
    def test_cancellation(self):
        f = make_bump(0.3, 0.8, 0.5)
        g = combine(f, f, 1.0, -1.0)
        us = np.linspace(-1.0, 1.5, 101)
        assert np.all(np.abs(g.jets(us)[0]) == 0.0)

    def test_disjoint_supports(self):
        f1 = make_bump(0.0, 0.5, 0.7)
        f2 = make_bump(3.0, 0.5, -0.4)
        s = combine(f1, f2, 1.0, 1.0)
        for u in (-0.3, 0.0, 0.4):
            assert s(u) == f1(u)
        assert s.support == (-0.5, 3.5)

    def test_linear_combination_pointwise(self, rng):
        f1 = make_bump(0.0, 1.0, 0.5)
        f2 = make_bump(0.4, 0.7, -0.3)
        g = combine(f1, f2, 2.0, 3.0)
        us = rng.uniform(-1.0, 1.2, 40)
        j1 = np.stack(f1.jets(us), axis=1)
        j2 = np.stack(f2.jets(us), axis=1)
        jg = np.stack(g.jets(us), axis=1)
        assert np.max(np.abs(jg - 2.0 * j1 - 3.0 * j2)) < 1e-14

    def test_picture_mismatch(self):
        with pytest.raises(ValueError):
            combine(make_bump(0, 1, 1), make_trigpoly(cos=[0, 1]), 1.0, 1.0)


def test_support_invariant_sampled():
    f = combine(make_bump(0.0, 1.0, 0.6), make_bump(1.5, 0.5, -0.2), 1.0, 1.0)
    lo, hi = f.support
    us = np.concatenate([np.linspace(lo - 5.0, lo - 1e-9, 120),
                         np.linspace(hi + 1e-9, hi + 5.0, 120)])
    jets = f.jets(us)
    assert all(np.all(j == 0.0) for j in jets)


class TestCayley:
    def test_zero_field(self):
        g = cayley_pushforward(zero_field("line"))
        th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        assert np.all(g.jets(th)[0] == 0.0)

    def test_pushforward_identity(self):
        """(C_* f)(C(u)) = C'(u) f(u), read in the angle coordinate."""
        f = make_bump(0.5, 1.5, 0.7)
        g = cayley_pushforward(f)
        us = np.linspace(-10.0, 10.0, 50)
        th = 2.0 * np.arctan(us)
        lhs = g.jets(th)[0]
        rhs = 2.0 * f.jets(us)[0] / (1.0 + us**2)
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    def test_vanishes_near_image_of_infinity(self):
        f = make_bump(0.0, 2.0, 1.0)
        g = cayley_pushforward(f)
        th = np.pi + np.linspace(-0.2, 0.2, 41)
        assert np.all(np.abs(g.jets(th)[0]) == 0.0)

    def test_angle_jets_frozen_symbolic_values(self):
        # reference jet from symbolic differentiation of
        # (1 + cos th) * bump(tan(th/2)) at th = 0.9
        g = cayley_pushforward(make_bump(0.3, 1.0, 0.5))
        rows = [float(a[0]) for a in g.jets(np.array([0.9]))]
        assert rows == pytest.approx([0.7831753445639601, -0.5676073361519834,
                                      -0.8891375904086987, 0.12731337308680074],
                                     rel=1e-11, abs=1e-12)

    def test_requires_line_field(self):
        with pytest.raises(ValueError):
            cayley_pushforward(make_trigpoly(cos=[0, 1]))


class TestSobolev:
    def test_cosine_three_halves(self):
        f = make_trigpoly(cos=[0.0, 1.0])
        assert sobolev_norm(f, 1.5) == pytest.approx(2.0**1.5, abs=1e-9)

    def test_zero_field(self):
        assert sobolev_norm(zero_field("circle"), 2.0) == 0.0

    def test_sin_two_at_zero(self):
        f = make_trigpoly(sin=[0.0, 0.0, 1.0])
        assert sobolev_norm(f, 0.0) == pytest.approx(1.0, abs=1e-12)

    def test_converges_as_modes_double(self):
        f = cayley_pushforward(make_bump(0.0, 1.0, 0.5))
        diffs = []
        prev = sobolev_norm(f, 1.5, 64)
        for n in (128, 256, 512, 1024):
            cur = sobolev_norm(f, 1.5, n)
            diffs.append(abs(cur - prev))
            prev = cur
        assert diffs[-1] < diffs[0]

    def test_validation(self):
        with pytest.raises(ValueError):
            sobolev_norm(make_bump(0, 1, 1), 1.5)
        with pytest.raises(ValueError):
            sobolev_norm(make_trigpoly(cos=[1.0]), 1.5, n_modes=8)


class TestFieldSpec:
    def test_bump_roundtrip(self):
        f = field_from_spec({"kind": "bump", "center": 1.0, "halfwidth": 0.5,
                             "amplitude": -0.25})
        assert f(1.0) == pytest.approx(-0.25)

    def test_cos2(self):
        assert field_from_spec({"kind": "cos2"})(0.0) == 1.0

    def test_trigpoly(self):
        f = field_from_spec({"kind": "trigpoly", "cos": [0, 0.5], "sin": [0, 0, 1]})
        assert f(0.0) == pytest.approx(0.5)

    def test_sum_with_coefficients(self):
        spec = {"kind": "sum", "terms": [
            {"kind": "bump", "center": 0, "halfwidth": 1, "amplitude": 1, "coef": 2.0},
            {"kind": "bump", "center": 0, "halfwidth": 1, "amplitude": 1, "coef": -1.0},
        ]}
        f = field_from_spec(spec)
        assert f(0.0) == pytest.approx(1.0)

    def test_empty_sum_is_zero_field(self):
        f = field_from_spec({"kind": "sum", "terms": []})
        assert f(0.0) == 0.0

    @pytest.mark.parametrize("bad", [
        {"kind": "nope"},
        {"no_kind": 1},
        {"kind": "bump", "center": 0.0},
        {"kind": "sum", "terms": "x"},
    ])
    def test_invalid_specs(self, bad):
        with pytest.raises(ValueError):
            field_from_spec(bad)

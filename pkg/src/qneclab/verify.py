"""Seeded invariant suites behind the ``verify`` CLI command.

Each suite runs a batch of numerical properties on randomized inputs and
reports the worst residual against its tolerance.  Random fields are sums
of one to four bumps with centers in [-3, 3], halfwidths in [0.2, 1] and
amplitudes in [-0.5, 0.5], which keeps every flow orientation-preserving
and bracketable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import asymptotics, cocycles, entropy
from .diffeo import AffineMap, compose, moebius_fixing, schwarzian_array
from .fields import VectorField, cayley_pushforward, combine, make_bump, make_trigpoly
from .flows import closed_form_flow, exponentiate

__all__ = ["PropertyResult", "random_bump_sum", "run_suite", "SUITES"]


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tolerance)


def random_bump_sum(rng: np.random.Generator, max_terms: int = 4) -> VectorField:
    n_terms = int(rng.integers(1, max_terms + 1))
    field = None
    for _ in range(n_terms):
        term = make_bump(rng.uniform(-3.0, 3.0), rng.uniform(0.2, 1.0),
                         rng.uniform(-0.5, 0.5))
        field = term if field is None else combine(field, term, 1.0, 1.0)
    return field


def random_circle_flow(rng: np.random.Generator):
    field = make_trigpoly(cos=rng.uniform(-0.05, 0.05, 4),
                          sin=rng.uniform(-0.05, 0.05, 4))
    return exponentiate(field, rng.uniform(0.5, 1.5))


def _suite_flows(rng: np.random.Generator, n_fields: int = 5) -> list[PropertyResult]:
    worst_group = 0.0
    worst_transport = 0.0
    worst_outside = 0.0
    worst_orient = 0.0
    worst_closed = 0.0
    for _ in range(n_fields):
        field = random_bump_sum(rng)
        lo, hi = field.support
        s, t = rng.uniform(-1.0, 1.0, 2)
        us = rng.uniform(lo - 0.5, hi + 0.5, 50)
        rho_s = exponentiate(field, s)
        rho_t = exponentiate(field, t)
        rho_st = exponentiate(field, s + t)
        worst_group = max(worst_group, float(np.max(np.abs(
            rho_st.values(us) - rho_s.values(rho_t.values(us))))))

        rows = rho_t.jets(us)
        f_at = field.jets(us)[0]
        f_img = field.jets(rows[:, 0])[0]
        mask = np.abs(f_at) > 1e-6
        if mask.any():
            worst_transport = max(worst_transport, float(np.max(np.abs(
                rows[mask, 1] - f_img[mask] / f_at[mask]))))

        u_out = np.concatenate([rng.uniform(lo - 3.0, lo - 0.01, 10),
                                rng.uniform(hi + 0.01, hi + 3.0, 10)])
        rows_out = rho_t.jets(u_out)
        worst_outside = max(worst_outside, float(np.max(np.abs(rows_out[:, 0] - u_out))))
        worst_orient = max(worst_orient, float(np.max(-rows[:, 1])))

        u0 = rng.uniform(lo, hi)
        if abs(field.jet(u0)[0]) > 1e-3:
            t_small = rng.uniform(0.05, 0.3)
            ode_val = exponentiate(field, t_small)(u0)
            closed = closed_form_flow(field, t_small, u0)
            worst_closed = max(worst_closed, abs(ode_val - closed))
    return [
        PropertyResult("flows", "group law Exp((s+t)f) = Exp(sf) Exp(tf)", worst_group, 1e-8),
        PropertyResult("flows", "derivative transport rho' = f(rho)/f", worst_transport, 1e-8),
        PropertyResult("flows", "identity outside support", worst_outside, 1e-14),
        PropertyResult("flows", "orientation rho' > 0", worst_orient, 0.0 + 1e-30),
        PropertyResult("flows", "closed-form flow vs ODE", worst_closed, 1e-8),
    ]


def _suite_schwarzian(rng: np.random.Generator, n_fields: int = 5) -> list[PropertyResult]:
    worst_moebius = 0.0
    worst_chain = 0.0
    worst_roundtrip = 0.0
    worst_nonzero = np.inf
    for _ in range(n_fields):
        aff = AffineMap(rng.uniform(0.3, 3.0), rng.uniform(-2.0, 2.0))
        us = rng.uniform(-5.0, 5.0, 30)
        worst_moebius = max(worst_moebius, float(np.max(np.abs(schwarzian_array(aff, us)))))

        f1 = random_bump_sum(rng)
        f2 = random_bump_sum(rng)
        rho = exponentiate(f1, rng.uniform(0.3, 1.0))
        sig = exponentiate(f2, rng.uniform(0.3, 1.0))
        both = compose(rho, sig)
        us = rng.uniform(-4.0, 4.0, 40)
        rows_s = sig.jets(us)
        chain = (rows_s[:, 1] ** 2 * schwarzian_array(rho, rows_s[:, 0])
                 + schwarzian_array(sig, us))
        worst_chain = max(worst_chain, float(np.max(np.abs(
            schwarzian_array(both, us) - chain))))

        eta = rho.inverse()
        round_rows = compose(rho, eta).jets(us)
        ident = np.stack([us, np.ones_like(us), np.zeros_like(us),
                          np.zeros_like(us)], axis=1)
        worst_roundtrip = max(worst_roundtrip, float(np.max(np.abs(round_rows - ident))))

        lo, hi = f1.support
        inside = np.linspace(lo, hi, 101)
        worst_nonzero = min(worst_nonzero, float(np.max(np.abs(
            schwarzian_array(rho, inside)))))
    return [
        PropertyResult("schwarzian", "Moebius maps have zero Schwarzian", worst_moebius, 1e-14),
        PropertyResult("schwarzian", "chain rule S(rho sig) = sig'^2 S rho(sig) + S sig",
                       worst_chain, 1e-8),
        PropertyResult("schwarzian", "invert/compose round trip jets", worst_roundtrip, 1e-8),
        PropertyResult("schwarzian", "flows have nonzero Schwarzian somewhere",
                       1e-6 - min(worst_nonzero, 1e-6), 1e-7),
    ]


def _suite_entropy(rng: np.random.Generator, n_fields: int = 4) -> list[PropertyResult]:
    worst_positivity = 0.0
    worst_qnec_fd = 0.0
    worst_qnec_sign = 0.0
    worst_monotone = 0.0
    worst_nested = 0.0
    worst_affine = 0.0
    worst_exchange = 0.0
    worst_reduction = 0.0
    worst_scaling = 0.0
    for _ in range(n_fields):
        field = random_bump_sum(rng)
        lo, hi = field.support
        rho = exponentiate(field, 1.0)
        t = rng.uniform(lo - 1.0, hi)

        rep = entropy.entropy_half_line(rho, t, 1.0, entropy.STATE_VS_VACUUM)
        worst_positivity = max(worst_positivity, -(rep.value + rep.quad_err))

        _s1, s2 = entropy.entropy_half_line_derivatives(rho, t, 1.0)
        h = 1e-3
        svals = [entropy.entropy_half_line(rho, t + k * h, 1.0).value
                 for k in (-1, 0, 1)]
        fd2 = (svals[0] - 2.0 * svals[1] + svals[2]) / h**2
        worst_qnec_fd = max(worst_qnec_fd,
                            abs(s2 - fd2) / (1.0 + abs(s2)))
        worst_qnec_sign = max(worst_qnec_sign, -s2)

        t2 = t + rng.uniform(0.1, 1.0)
        rep2 = entropy.entropy_half_line(rho, t2, 1.0, entropy.STATE_VS_VACUUM)
        worst_monotone = max(worst_monotone,
                             rep2.value - rep.value - rep.quad_err - rep2.quad_err)

        a = rng.uniform(lo - 1.0, lo)
        b = rng.uniform(hi, hi + 1.0)
        inner = entropy.entropy_interval(rho, a + 0.2, b - 0.2, 1.0,
                                         entropy.VACUUM_VS_STATE)
        outer = entropy.entropy_interval(rho, a, b, 1.0, entropy.VACUUM_VS_STATE)
        worst_nested = max(worst_nested, inner.value - outer.value
                           - inner.quad_err - outer.quad_err - 1e-10)

        shift = AffineMap(1.0, -t)
        shifted = compose(shift, rho)
        rep_shift = entropy.entropy_half_line(shifted, 0.0, 1.0,
                                              entropy.STATE_VS_VACUUM)
        worst_affine = max(worst_affine, abs(rep.value - rep_shift.value))

        eta = rho.inverse()
        lhs = entropy.entropy_half_line(rho, t, 1.0, entropy.VACUUM_VS_STATE)
        rhs = entropy.entropy_half_line(eta, eta(t), 1.0, entropy.STATE_VS_VACUUM)
        worst_exchange = max(worst_exchange, abs(lhs.value - rhs.value))

        # interval formula reduces to the fixed-endpoint form when rho fixes a, b
        a_fix = lo - rng.uniform(0.1, 0.5)
        b_fix = hi + rng.uniform(0.1, 0.5)
        direct = entropy.entropy_interval(rho, a_fix, b_fix, 1.0,
                                          entropy.VACUUM_VS_STATE)
        _f1, f2v = entropy.entropy_interval_fixed_endpoint_forms(rho, a_fix, b_fix, 1.0)
        worst_reduction = max(worst_reduction, abs(direct.value - f2v))

        c_big = rng.uniform(2.0, 10.0)
        rep_c = entropy.entropy_half_line(rho, t, c_big, entropy.STATE_VS_VACUUM)
        worst_scaling = max(worst_scaling, abs(rep_c.value - c_big * rep.value))
    return [
        PropertyResult("entropy", "positivity S >= -quad_err", worst_positivity, 1e-12),
        PropertyResult("entropy", "QNEC: S'' closed form vs finite difference",
                       worst_qnec_fd, 1e-4),
        PropertyResult("entropy", "QNEC: S'' >= 0", worst_qnec_sign, 1e-14),
        PropertyResult("entropy", "monotonicity in the cut t", worst_monotone, 1e-10),
        PropertyResult("entropy", "interval monotonicity under inclusion",
                       worst_nested, 1e-10),
        PropertyResult("entropy", "affine covariance under shifts", worst_affine, 1e-8),
        PropertyResult("entropy", "exchange identity", worst_exchange, 1e-8),
        PropertyResult("entropy", "bounded formula reduces when endpoints fixed",
                       worst_reduction, 1e-8),
        PropertyResult("entropy", "linear scaling in central charge", worst_scaling, 1e-10),
    ]


def _suite_cocycles(rng: np.random.Generator, n_triples: int = 8) -> list[PropertyResult]:
    worst_identity = 0.0
    worst_cobound = 0.0
    worst_antisym = 0.0
    worst_bilinear = 0.0
    worst_beta = 0.0
    for _ in range(n_triples):
        g1 = random_circle_flow(rng)
        g2 = random_circle_flow(rng)
        g3 = random_circle_flow(rng)
        from .diffeo import identity as _id
        worst_identity = max(worst_identity,
                             abs(cocycles.bott_cocycle(_id("circle"), g1).value),
                             abs(cocycles.bott_cocycle(g1, _id("circle")).value))
        worst_cobound = max(worst_cobound, abs(cocycles.coboundary_check(g1, g2, g3)))

        fa = make_trigpoly(cos=rng.uniform(-0.3, 0.3, 4), sin=rng.uniform(-0.3, 0.3, 4))
        fb = make_trigpoly(cos=rng.uniform(-0.3, 0.3, 4), sin=rng.uniform(-0.3, 0.3, 4))
        fc = make_trigpoly(cos=rng.uniform(-0.3, 0.3, 4), sin=rng.uniform(-0.3, 0.3, 4))
        wab = cocycles.central_term_omega(fa, fb).value
        worst_antisym = max(worst_antisym,
                            abs(wab + cocycles.central_term_omega(fb, fa).value),
                            abs(cocycles.central_term_omega(fa, fa).value))
        x, y = rng.uniform(-2.0, 2.0, 2)
        lin = combine(fa, fb, x, y)
        worst_bilinear = max(worst_bilinear, abs(
            cocycles.central_term_omega(lin, fc).value
            - x * cocycles.central_term_omega(fa, fc).value
            - y * cocycles.central_term_omega(fb, fc).value))

        from .diffeo import RotationMap
        rot = RotationMap(rng.uniform(0.0, 2.0 * np.pi))
        worst_beta = max(worst_beta, abs(cocycles.anomaly_beta(rot, fa).value))
    return [
        PropertyResult("cocycles", "B(id, .) = B(., id) = 0", worst_identity, 1e-10),
        PropertyResult("cocycles", "coboundary of B vanishes", worst_cobound, 1e-7),
        PropertyResult("cocycles", "central term antisymmetry", worst_antisym, 1e-10),
        PropertyResult("cocycles", "central term bilinearity", worst_bilinear, 1e-10),
        PropertyResult("cocycles", "anomaly vanishes on rotations", worst_beta, 1e-12),
    ]


def _suite_asymptotics(rng: np.random.Generator) -> list[PropertyResult]:
    from .quadrature import adaptive_quad

    worst_int = 0.0
    for r in (0.5, 2.0, float(np.e), 10.0):
        for n in (1, 5, 50):
            frag = asymptotics.h_seq(r, n)
            val, _ = adaptive_quad(
                lambda us: us * (frag.jets(us)[:, 2] / frag.jets(us)[:, 1]) ** 2,
                0.0, 1.0 / n, abs_tol=1e-13)
            worst_int = max(worst_int, abs(val - np.log(r) ** 2 / 2.0))

    worst_endpoint = 0.0
    for r in (0.5, 2.0, 3.0):
        for n in (5, 20):
            h = asymptotics.h_seq(r, n)
            worst_endpoint = max(
                worst_endpoint,
                abs(h.jet_at(0.0).value), abs(h.jet_at(0.0).d1 - 1.0),
                abs(h.jet_at(1.0 / n).d1 - r))
            if n > r:
                sg = asymptotics.sigma_seq(r, n)
                worst_endpoint = max(
                    worst_endpoint,
                    abs(sg.jet_at(0.0).value),
                    abs(sg.jet_at(1.0 - 1.0 / n).d1 - 1.0))
            zt = asymptotics.zeta_seq(r, n)
            worst_endpoint = max(
                worst_endpoint,
                abs(zt.jet_at(-1.0 / n).value + 1.0 / n),
                abs(zt.jet_at(0.0).d1 - r))

    worst_trend = 0.0
    vals = [asymptotics.nu_limit_integrals(2.0, float(np.e), n) for n in (10, 100, 1000)]
    for k in range(2):
        if not (abs(vals[k + 1]["I_n"]) < abs(vals[k]["I_n"])
                and abs(vals[k + 1]["J_n"]) < abs(vals[k]["J_n"])):
            worst_trend = 1.0

    worst_ext = 0.0
    for _ in range(3):
        f1 = make_bump(rng.uniform(-1.0, 0.0), rng.uniform(0.5, 1.0),
                       rng.uniform(-0.4, 0.4))
        f2 = make_bump(rng.uniform(0.0, 1.0), rng.uniform(0.5, 1.0),
                       rng.uniform(-0.4, 0.4))
        for t in rng.uniform(-2.0, 1.5, 4):
            rep = asymptotics.extensivity_report(f1, f2, float(t))
            worst_ext = max(worst_ext, abs(rep.s_exact) - rep.bound - rep.quad_err)
    return [
        PropertyResult("asymptotics", "weighted h-fragment integral = (log r)^2/2",
                       worst_int, 1e-10),
        PropertyResult("asymptotics", "fragment endpoint jets", worst_endpoint, 1e-12),
        PropertyResult("asymptotics", "limit integrals shrink along n", worst_trend, 0.5),
        PropertyResult("asymptotics", "extensivity bound", worst_ext, 1e-12),
    ]


SUITES = {
    "flows": _suite_flows,
    "schwarzian": _suite_schwarzian,
    "entropy": _suite_entropy,
    "cocycles": _suite_cocycles,
    "asymptotics": _suite_asymptotics,
}


def run_suite(name: str, seed: int, tolerance_scale: float = 1.0) -> list[PropertyResult]:
    """Run one named suite (or 'all') with a seeded generator."""
    names = list(SUITES) if name == "all" else [name]
    results: list[PropertyResult] = []
    for suite_name in names:
        if suite_name not in SUITES:
            raise ValueError(f"unknown suite {suite_name!r}")
        rng = np.random.default_rng(seed)
        raw = SUITES[suite_name](rng)
        results.extend(PropertyResult(r.suite, r.name, r.residual,
                                      r.tolerance * tolerance_scale)
                       for r in raw)
    return results

"""Relative entropies, QNEC derivatives, energies and the Bekenstein check.

Conventions: the two states are the vacuum and the unitary state obtained
by representing a diffeomorphism rho; writing eta = rho^{-1},

  half line (t, inf):
    state_vs_vacuum : S = (c/24) int_t^inf (u-t) (eta''/eta')^2 du
    vacuum_vs_state : S = (c/24) int_{eta(t)}^inf (u-eta(t)) (rho''/rho')^2 du

  bounded interval (a, b), D_(a,b)(u) = (b-u)(u-a)/(b-a):
    vacuum_vs_state : S = -(c/12) int D_(a',b') S_rho
                          + (c/12) log rho'(a')rho'(b')
                          + (c/12) log ((b'-a')/(b-a))^2,   a' = eta(a), b' = eta(b)
    state_vs_vacuum : same with eta jets on (a, b) and the opposite sign on
                      the squared-log term.

The integrands vanish where the map is affine, so every integral is proper
and truncated to the map's curvature support.  Direction names are fixed
here once: state_vs_vacuum means S(omega_V || omega), vacuum_vs_state means
S(omega || omega_V).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffeo import Diffeomorphism, LINE, schwarzian_array
from .quadrature import adaptive_quad

__all__ = [
    "STATE_VS_VACUUM",
    "VACUUM_VS_STATE",
    "Interval",
    "EntropyReport",
    "BekensteinRecord",
    "dilation_density",
    "entropy_half_line",
    "entropy_half_line_derivatives",
    "entropy_exchanged_derivative_formula",
    "entropy_interval",
    "entropy_interval_fixed_endpoint_forms",
    "vacuum_energy",
    "bekenstein_check",
    "qnec_energy_density",
]

STATE_VS_VACUUM = "state_vs_vacuum"   # S(omega_{V(rho)} || omega)
VACUUM_VS_STATE = "vacuum_vs_state"   # S(omega || omega_{V(rho)})
_DIRECTIONS = (STATE_VS_VACUUM, VACUUM_VS_STATE)


@dataclass(frozen=True)
class Interval:
    """Either a half line (t, inf) or a bounded interval (a, b)."""

    kind: str
    endpoints: tuple[float, ...]

    @classmethod
    def half_line(cls, t: float) -> "Interval":
        if not math.isfinite(t):
            raise ValueError("half-line cut must be finite")
        return cls("half_line", (float(t),))

    @classmethod
    def bounded(cls, a: float, b: float) -> "Interval":
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("interval endpoints must be finite")
        if a >= b:
            raise ValueError(f"need a < b, got ({a}, {b})")
        return cls("bounded", (float(a), float(b)))


@dataclass(frozen=True)
class EntropyReport:
    value: float
    direction: str
    interval: Interval
    central_charge: float
    quad_err: float

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if not self.central_charge > 0:
            raise ValueError("central charge must be positive")
        if not math.isfinite(self.value):
            raise ValueError("entropy value is not finite")
        if self.value < -(self.quad_err + 1e-9):
            raise ValueError(
                f"negative relative entropy {self.value} beyond the "
                f"quadrature error {self.quad_err}")


@dataclass(frozen=True)
class BekensteinRecord:
    entropy: float
    energy: float
    margin: float
    passed: bool
    radius: float
    direction: str
    quad_err: float


def dilation_density(a: float, b: float, u) -> float | np.ndarray:
    """D_(a,b)(u) = (b-u)(u-a)/(b-a), the bounded-interval dilation weight."""
    if a >= b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    if np.isscalar(u):
        return float((b - u) * (u - a) / (b - a))
    u = np.asarray(u, dtype=float)
    return (b - u) * (u - a) / (b - a)


def _require_line(rho: Diffeomorphism) -> None:
    if rho.picture != LINE:
        raise ValueError("entropy formulas apply to line-picture maps")


def _check_direction(direction: str) -> None:
    if direction not in _DIRECTIONS:
        raise ValueError(
            f"direction must be one of {_DIRECTIONS}, got {direction!r}")


def _log_ratio_sq(mapping: Diffeomorphism, us: np.ndarray) -> np.ndarray:
    rows = mapping.jets(us)
    return (rows[:, 2] / rows[:, 1]) ** 2


def _weighted_tail_integral(mapping: Diffeomorphism, t: float,
                            quad_tol: float) -> tuple[float, float]:
    """integral_t^inf (u - t) (m''/m')^2 du over the curvature support."""
    supp = mapping.curvature_support
    if supp is None:
        return 0.0, 0.0
    lo, hi = max(t, supp[0]), supp[1]
    if lo >= hi:
        return 0.0, 0.0
    return adaptive_quad(
        lambda us: (us - t) * _log_ratio_sq(mapping, us), lo, hi,
        abs_tol=quad_tol, breakpoints=mapping.breakpoints)


def _tail_integral(mapping: Diffeomorphism, t: float,
                   quad_tol: float, upper: float | None = None) -> tuple[float, float]:
    """integral_t^upper (m''/m')^2 du, truncated to the curvature support."""
    supp = mapping.curvature_support
    if supp is None:
        return 0.0, 0.0
    lo = max(t, supp[0])
    hi = supp[1] if upper is None else min(upper, supp[1])
    if lo >= hi:
        return 0.0, 0.0
    return adaptive_quad(lambda us: _log_ratio_sq(mapping, us), lo, hi,
                         abs_tol=quad_tol, breakpoints=mapping.breakpoints)


def entropy_half_line(rho: Diffeomorphism, t: float, c: float = 1.0,
                      direction: str = STATE_VS_VACUUM,
                      quad_tol: float = 1e-10) -> EntropyReport:
    """Relative entropy on (t, inf) for the state of ``rho``."""
    _require_line(rho)
    _check_direction(direction)
    if direction == STATE_VS_VACUUM:
        mapping = rho.inverse()
        cut = float(t)
    else:
        eta = rho.inverse()
        mapping = rho
        cut = float(eta(t))
    raw, err = _weighted_tail_integral(mapping, cut, quad_tol)
    return EntropyReport(
        value=(c / 24.0) * raw,
        direction=direction,
        interval=Interval.half_line(t),
        central_charge=c,
        quad_err=(c / 24.0) * err,
    )


def entropy_half_line_derivatives(rho: Diffeomorphism, t: float, c: float = 1.0,
                                  quad_tol: float = 1e-10) -> tuple[float, float]:
    """(S'(t), S''(t)) for S(t) = S_(t,inf)(omega_V || omega).

    S'(t) = -(c/24) int_t^inf (eta''/eta')^2 du by differentiating under
    the integral; S''(t) = (c/24) (eta''(t)/eta'(t))^2 in closed form, which
    is the QNEC statement S'' >= 0.
    """
    _require_line(rho)
    eta = rho.inverse()
    raw, _err = _tail_integral(eta, float(t), quad_tol)
    jet = eta.jet_at(float(t))
    s1 = -(c / 24.0) * raw
    s2 = (c / 24.0) * (jet.d2 / jet.d1) ** 2
    return s1, s2


def entropy_exchanged_derivative_formula(rho: Diffeomorphism, t: float,
                                         c: float = 1.0,
                                         quad_tol: float = 1e-10) -> tuple[float, float]:
    """(S'(rho(t)), S''(rho(t))) for S(s) = S_(s,inf)(omega || omega_V).

    Evaluates the closed forms

      S'(rho(t)) rho'(t)   = -(c/24) int_t^inf (rho''/rho')^2 du
      S''(rho(t)) rho'(t)^2 = (c/24)(rho''/rho')(t) [ (rho''/rho')(t)
                              + int_t^inf (rho''/rho')^2 du ]

    so the first derivative is always <= 0 while the second may change sign.
    """
    _require_line(rho)
    raw, _err = _tail_integral(rho, float(t), quad_tol)
    jet = rho.jet_at(float(t))
    ratio = jet.d2 / jet.d1
    s1 = -(c / 24.0) * raw / jet.d1
    s2 = (c / 24.0) * ratio * (ratio + raw) / jet.d1**2
    return s1, s2


def _dilation_schwarzian_integral(mapping: Diffeomorphism, a: float, b: float,
                                  quad_tol: float) -> tuple[float, float]:
    supp = mapping.curvature_support
    if supp is None:
        return 0.0, 0.0
    lo, hi = max(a, supp[0]), min(b, supp[1])
    if lo >= hi:
        return 0.0, 0.0
    return adaptive_quad(
        lambda us: dilation_density(a, b, us) * schwarzian_array(mapping, us),
        lo, hi, abs_tol=quad_tol, breakpoints=mapping.breakpoints)


def entropy_interval(rho: Diffeomorphism, a: float, b: float, c: float = 1.0,
                     direction: str = VACUUM_VS_STATE,
                     quad_tol: float = 1e-10) -> EntropyReport:
    """Relative entropy on a bounded interval (a, b)."""
    _require_line(rho)
    _check_direction(direction)
    if a >= b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    eta = rho.inverse()
    if direction == VACUUM_VS_STATE:
        ap, bp = eta(a), eta(b)
        integral, err = _dilation_schwarzian_integral(rho, ap, bp, quad_tol)
        ja, jb = rho.jet_at(ap), rho.jet_at(bp)
        value = (-(c / 12.0) * integral
                 + (c / 12.0) * math.log(ja.d1 * jb.d1)
                 + (c / 12.0) * math.log(((bp - ap) / (b - a)) ** 2))
    else:
        integral, err = _dilation_schwarzian_integral(eta, a, b, quad_tol)
        ja, jb = eta.jet_at(a), eta.jet_at(b)
        value = (-(c / 12.0) * integral
                 + (c / 12.0) * math.log(ja.d1 * jb.d1)
                 - (c / 12.0) * math.log(((eta(b) - eta(a)) / (b - a)) ** 2))
    return EntropyReport(
        value=value,
        direction=direction,
        interval=Interval.bounded(a, b),
        central_charge=c,
        quad_err=(c / 12.0) * err,
    )


def entropy_interval_fixed_endpoint_forms(rho: Diffeomorphism, a: float,
                                          b: float, c: float = 1.0,
                                          quad_tol: float = 1e-10,
                                          fix_tol: float = 1e-10) -> tuple[float, float]:
    """Both fixed-endpoint expressions for S_(a,b)(omega || omega_V).

    Requires rho(a) = a and rho(b) = b.  The two returned forms are related
    by integration by parts and must agree to quadrature accuracy:

      form1 = (c/24) int D (rho''/rho')^2 + (c/6)/(b-a) int log rho'
      form2 = -(c/12) int D S_rho + (c/12) log rho'(a) rho'(b)
    """
    _require_line(rho)
    if a >= b:
        raise ValueError(f"need a < b, got ({a}, {b})")
    scale = max(1.0, abs(a), abs(b))
    if abs(rho(a) - a) > fix_tol * scale or abs(rho(b) - b) > fix_tol * scale:
        raise ValueError(
            f"rho must fix both endpoints: rho({a})={rho(a)}, rho({b})={rho(b)}")

    breakpoints = list(rho.breakpoints)
    if rho.curvature_support is not None:
        breakpoints.extend(rho.curvature_support)

    sq, err_sq = adaptive_quad(
        lambda us: dilation_density(a, b, us) * _log_ratio_sq(rho, us),
        a, b, abs_tol=quad_tol, breakpoints=breakpoints)
    logp, _ = adaptive_quad(
        lambda us: np.log(rho.jets(us)[:, 1]),
        a, b, abs_tol=quad_tol, breakpoints=breakpoints)
    form1 = (c / 24.0) * sq + (c / 6.0) / (b - a) * logp

    sw, err_sw = adaptive_quad(
        lambda us: dilation_density(a, b, us) * schwarzian_array(rho, us),
        a, b, abs_tol=quad_tol, breakpoints=breakpoints)
    ja, jb = rho.jet_at(a), rho.jet_at(b)
    form2 = -(c / 12.0) * sw + (c / 12.0) * math.log(ja.d1 * jb.d1)
    return form1, form2


def vacuum_energy(rho: Diffeomorphism, c: float = 1.0,
                  direction: str = VACUUM_VS_STATE,
                  quad_tol: float = 1e-12) -> float:
    """Mean vacuum energy of the charge: (c/48 pi) int (m''/m')^2 du.

    The jets are rho's for the vacuum_vs_state pairing and eta's for the
    state_vs_vacuum pairing, matching the Bekenstein inequality sides.
    """
    _require_line(rho)
    _check_direction(direction)
    mapping = rho if direction == VACUUM_VS_STATE else rho.inverse()
    raw, _err = _tail_integral(mapping, -math.inf, quad_tol)
    return (c / (48.0 * math.pi)) * raw


def bekenstein_check(rho: Diffeomorphism, r: float, c: float = 1.0,
                     direction: str = VACUUM_VS_STATE,
                     quad_tol: float = 1e-10) -> BekensteinRecord:
    """Compare S_(-r,r) with pi*r*E; passes when the margin is nonnegative."""
    if not r > 0:
        raise ValueError("radius must be positive")
    report = entropy_interval(rho, -r, r, c, direction, quad_tol)
    energy = vacuum_energy(rho, c, direction)
    margin = math.pi * r * energy - report.value
    return BekensteinRecord(
        entropy=report.value,
        energy=energy,
        margin=margin,
        passed=bool(margin >= -report.quad_err),
        radius=r,
        direction=direction,
        quad_err=report.quad_err,
    )


def qnec_energy_density(rho: Diffeomorphism, t: float, t_prime: float,
                        c: float = 1.0, quad_tol: float = 1e-12) -> float:
    """Windowed energy (c/24 pi) int_t^{t'} (eta''/eta')^2 du.

    The density limit of this window equals S''(t)/(2 pi), making the QNEC
    an equality for these states.
    """
    _require_line(rho)
    if not t < t_prime:
        raise ValueError("need t < t_prime")
    eta = rho.inverse()
    raw, _err = _tail_integral(eta, float(t), quad_tol, upper=float(t_prime))
    return (c / (24.0 * math.pi)) * raw

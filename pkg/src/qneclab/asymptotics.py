"""Approximation sequences, their limit identities, and entropy extensivity.

The fragment families h_n, sigma_n, zeta_n interpolate between unit and
prescribed derivative over shrinking windows; they are returned as
diffeomorphism fragments with analytic jets.  ``glued_approximant`` builds
the endpoint-fixing approximants rho_n of a map fixing a and b (with
generic derivatives r_a, r_b there) out of h-fragments and an
affine-conjugated copy of rho, glued continuously and integrated piecewise
between the junctions.  Their weighted Schwarzian integrals converge to

    -((log r_a)^2 + (log r_b)^2)/4 + int_a^b D_(a,b) S_rho du,

which ``schwarzian_limit_check`` traces numerically.

``sigma_seq`` implements the corrected exponent log(n/r)/log(n) in both
terms; the printed variant (second exponent log(n/r)/log(r)) is available
behind ``as_printed=True`` for comparison but does not vanish at 0.

The extensivity deviation s_t(f1, f2) = S_{f1+f2}(t) - S_{f1}(t) - S_{f2}(t)
is computed exactly through the entropy module and compared against the
four-part bound eps0 + eps1 + eps2 + eps3 built from sup norms of second
derivatives and Cauchy-Schwarz in the weight (u - t) du.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffeo import Diffeomorphism, ExplicitMap, identity
from .entropy import STATE_VS_VACUUM, dilation_density, entropy_half_line
from .fields import VectorField, combine
from .flows import DEFAULT_CONFIG, FlowConfig, exponentiate
from .quadrature import adaptive_quad
from .diffeo import schwarzian_array

__all__ = [
    "ExtensivityReport",
    "h_seq",
    "sigma_seq",
    "zeta_seq",
    "nu_limit_integrals",
    "glued_approximant",
    "schwarzian_limit_check",
    "schwarzian_limit_target",
    "extensivity_delta",
    "extensivity_report",
]


def h_seq(r: float, n: int) -> Diffeomorphism:
    """Fragment (e^{n log(r) u} - 1)/(n log r) on [0, 1/n].

    Fixes 0 with unit derivative and reaches derivative r at 1/n; its
    log-derivative is the constant n log r, so the weighted square integral
    int_0^{1/n} u (h''/h')^2 du equals (log r)^2 / 2 for every n.
    """
    if not r > 0:
        raise ValueError("derivative target r must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if r == 1.0:
        return identity()
    nl = n * math.log(r)

    def jet_fn(us: np.ndarray) -> np.ndarray:
        e = np.exp(nl * us)
        rows = np.empty((us.size, 4))
        rows[:, 0] = np.expm1(nl * us) / nl
        rows[:, 1] = e
        rows[:, 2] = nl * e
        rows[:, 3] = nl * nl * e
        return rows

    return ExplicitMap(jet_fn, curvature_support=(0.0, 1.0 / n),
                       fixed_point_data=((0.0, 1.0),),
                       label=f"h[{r:g},{n}]")


def sigma_seq(r: float, n: int, as_printed: bool = False) -> Diffeomorphism:
    """Fragment on [0, 1 - 1/n] with sigma(0) = 0 and unit slope at 1 - 1/n.

    sigma(u) = (log n/log(n/r)) [(u + 1/n)^e - (1/n)^e2] with first exponent
    e = log(n/r)/log n.  The corrected form uses e2 = e, which is what makes
    sigma(0) = 0 hold; ``as_printed=True`` keeps e2 = log(n/r)/log(r)
    instead.
    """
    if not r > 0:
        raise ValueError("derivative target r must be positive")
    if n < 2:
        raise ValueError("need n >= 2")
    if n <= r:
        raise ValueError(f"need n > r, got n={n}, r={r}")
    if r == 1.0:
        return identity()
    k = math.log(n) / math.log(n / r)
    e = math.log(n / r) / math.log(n)
    e2 = (math.log(n / r) / math.log(r)) if as_printed else e
    shift = (1.0 / n) ** e2

    def jet_fn(us: np.ndarray) -> np.ndarray:
        base = us + 1.0 / n
        rows = np.empty((us.size, 4))
        rows[:, 0] = k * (base ** e - shift)
        rows[:, 1] = base ** (e - 1.0)          # k * e == 1
        rows[:, 2] = (e - 1.0) * base ** (e - 2.0)
        rows[:, 3] = (e - 1.0) * (e - 2.0) * base ** (e - 3.0)
        return rows

    return ExplicitMap(jet_fn, curvature_support=(0.0, 1.0 - 1.0 / n),
                       label=f"sigma[{r:g},{n}]")


def zeta_seq(r: float, n: int) -> Diffeomorphism:
    """Fragment on [-1/n, 0] with unit slope at -1/n and slope r at 0.

    zeta(u) = -1/n + int_{-1/n}^u exp[(log r)(n s + 1)^{1/n}] ds; the
    log-derivative is (log r)(1 + n u)^{1/n - 1}, integrable but unbounded
    at the left endpoint for n >= 2.
    """
    if not r > 0:
        raise ValueError("derivative target r must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if r == 1.0:
        return identity()
    lr = math.log(r)

    def d1_of(us: np.ndarray) -> np.ndarray:
        base = np.clip(1.0 + n * us, 0.0, None)
        return np.exp(lr * base ** (1.0 / n))

    def value_of(u: float) -> float:
        val, _ = adaptive_quad(d1_of, -1.0 / n, u, abs_tol=1e-14)
        return -1.0 / n + val

    def jet_fn(us: np.ndarray) -> np.ndarray:
        rows = np.empty((us.size, 4))
        rows[:, 0] = [value_of(float(u)) for u in us]
        d1 = d1_of(us)
        base = np.clip(1.0 + n * us, 0.0, None)
        with np.errstate(divide="ignore"):
            logd = lr * base ** (1.0 / n - 1.0)
            logd2 = (lr * lr * base ** (2.0 / n - 2.0)
                     + lr * (1.0 - n) * base ** (1.0 / n - 2.0))
        rows[:, 1] = d1
        rows[:, 2] = d1 * logd
        rows[:, 3] = d1 * logd2
        return rows

    return ExplicitMap(jet_fn, curvature_support=(-1.0 / n, 0.0),
                       label=f"zeta[{r:g},{n}]")


def nu_limit_integrals(r0: float, r3: float, n: int) -> dict:
    """The two vanishing integrals controlling the constant-term bound.

    I_n weights the squared zeta log-derivative (1 + n u)^{-2(1-1/n)} by the
    dilation-density bound (u + 1/n) near each endpoint of (0, 3); J_n
    integrates (1 + n u)^{1/n} against log r.  Both tend to 0 as n grows.
    Integrands are regularized by the substitution v = w^n, which removes
    the integrable endpoint singularity before quadrature.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not (r0 > 0 and r3 > 0):
        raise ValueError("derivative targets must be positive")

    # each endpoint contributes the same integral up to its log factor; with
    # v = 1 + n u and then v = w^n the pieces become polynomial:
    #   I piece: (1/n^2) int_0^1 v^{2/n - 1} dv = int_0^1 (w/n) dw
    #   J piece: (1/n)   int_0^1 v^{1/n} dv    = int_0^1 w^n dw
    def i_piece() -> float:
        val, _ = adaptive_quad(lambda w: w / n, 0.0, 1.0, abs_tol=1e-13)
        return val

    def j_piece() -> float:
        val, _ = adaptive_quad(lambda w: w ** float(n), 0.0, 1.0, abs_tol=1e-13)
        return val

    ip = i_piece()
    jp = j_piece()
    return {
        "I_n": (math.log(r0) ** 2 + math.log(r3) ** 2) * ip,
        "J_n": (math.log(r0) + math.log(r3)) * jp,
    }


def glued_approximant(rho: Diffeomorphism, a: float, b: float, n: int,
                      fix_tol: float = 1e-9) -> Diffeomorphism:
    """The n-th approximant of ``rho`` with unit derivatives at a and b.

    Requires rho(a) = a and rho(b) = b.  Pieces: identity outside [a, b],
    h-fragments matching the derivative over [a, a+1/n] and [b-1/n, b], and
    an affine-conjugated copy of rho in between.  The pieces meet
    continuously with derivative mismatches of order 1/n at the inner
    junctions, which are exposed as ``breakpoints`` so quadratures treat the
    map piecewise.  Smoothing the junctions over a shrinking window is NOT
    done on purpose: the log-derivative of the h-fragment is of order n, so
    any C^2 transition window would add a non-vanishing D * (jump of
    rho''/rho') term to the weighted Schwarzian integral and shift its limit
    by log r_a + log r_b; the limit identity holds for the piecewise
    integral, which is what the breakpoints give.
    """
    if a >= b:
        raise ValueError("need a < b")
    if n < max(2, int(4.0 / (b - a)) + 1):
        raise ValueError(f"n={n} too small for interval ({a}, {b})")
    ja = rho.jet_at(a)
    jb = rho.jet_at(b)
    scale = max(1.0, abs(a), abs(b))
    if abs(ja.value - a) > fix_tol * scale or abs(jb.value - b) > fix_tol * scale:
        raise ValueError("rho must fix both endpoints of the interval")
    ra, rb = ja.d1, jb.d1

    an = a + 1.0 / n
    bn = b - 1.0 / n

    h_left = h_seq(ra, n)
    h_right = h_seq(rb, n)

    def left_rows(us: np.ndarray) -> np.ndarray:
        rows = h_left.jets(us - a)
        rows[:, 0] += a
        return rows

    def right_rows(us: np.ndarray) -> np.ndarray:
        rows = h_right.jets(b - us)
        out = np.empty_like(rows)
        out[:, 0] = b - rows[:, 0]
        out[:, 1] = rows[:, 1]
        out[:, 2] = -rows[:, 2]
        out[:, 3] = rows[:, 3]
        return out

    h1_an = float(left_rows(np.array([an]))[0, 0])
    h2_bn = float(right_rows(np.array([bn]))[0, 0])
    m2 = (b - a) / (bn - an)
    q2 = a - m2 * an
    m1 = (h2_bn - h1_an) / (b - a)
    q1 = h1_an - m1 * a

    def mid_rows(us: np.ndarray) -> np.ndarray:
        rows = rho.jets(m2 * us + q2)
        out = np.empty_like(rows)
        out[:, 0] = m1 * rows[:, 0] + q1
        out[:, 1] = m1 * rows[:, 1] * m2
        out[:, 2] = m1 * rows[:, 2] * m2**2
        out[:, 3] = m1 * rows[:, 3] * m2**3
        return out

    def ident_rows(us: np.ndarray) -> np.ndarray:
        rows = np.zeros((us.size, 4))
        rows[:, 0] = us
        rows[:, 1] = 1.0
        return rows

    regions = [
        (-math.inf, a, ident_rows),
        (a, an, left_rows),
        (an, bn, mid_rows),
        (bn, b, right_rows),
        (b, math.inf, ident_rows),
    ]

    def jet_fn(us: np.ndarray) -> np.ndarray:
        out = np.empty((us.size, 4))
        for lo, hi, piece in regions:
            m = (us >= lo) & (us < hi)
            if m.any():
                out[m] = piece(us[m])
        return out

    return ExplicitMap(
        jet_fn,
        curvature_support=(a, b),
        breakpoints=(a, an, bn, b),
        label=f"glued[{n}]")


def schwarzian_limit_target(rho: Diffeomorphism, a: float, b: float,
                            quad_tol: float = 1e-11) -> float:
    """Limit value: -((log r_a)^2 + (log r_b)^2)/4 + int_a^b D S_rho du."""
    ra = rho.jet_at(a).d1
    rb = rho.jet_at(b).d1
    integral, _ = adaptive_quad(
        lambda us: dilation_density(a, b, us) * schwarzian_array(rho, us),
        a, b, abs_tol=quad_tol, breakpoints=rho.breakpoints)
    return -(math.log(ra) ** 2 + math.log(rb) ** 2) / 4.0 + integral


def schwarzian_limit_check(rho: Diffeomorphism, a: float, b: float,
                           ns, quad_tol: float = 1e-10,
                           monotone_samples: int = 2001) -> list[float]:
    """Weighted Schwarzian integrals of the glued approximants.

    Returns [int_a^b D_(a,b) S rho_n du for n in ns]; the differences from
    ``schwarzian_limit_target`` shrink as n grows (empirically like 1/n for
    this gluing).
    """
    out = []
    for n in ns:
        rho_n = glued_approximant(rho, a, b, int(n))
        grid = np.linspace(a, b, monotone_samples)
        d1 = rho_n.jets(grid)[:, 1]
        if np.any(d1 <= 0.0):
            raise ValueError(f"glued approximant for n={n} is not increasing")
        val, _ = adaptive_quad(
            lambda us: dilation_density(a, b, us) * schwarzian_array(rho_n, us),
            a, b, abs_tol=quad_tol, breakpoints=rho_n.breakpoints)
        out.append(val)
    return out


def extensivity_delta(f1: VectorField, f2: VectorField, u: float,
                      cfg: FlowConfig = DEFAULT_CONFIG) -> float:
    """Pointwise transport defect f'(eta(u)) - f1'(eta1(u)) - f2'(eta2(u)).

    eta, eta1, eta2 are the time-one inverse flows of f1+f2, f1, f2; the
    defect vanishes wherever the supports do not interact.
    """
    total = combine(f1, f2, 1.0, 1.0)
    eta = exponentiate(total, -1.0, cfg)
    eta1 = exponentiate(f1, -1.0, cfg)
    eta2 = exponentiate(f2, -1.0, cfg)
    fp = total.jet(eta(u))[1]
    f1p = f1.jet(eta1(u))[1]
    f2p = f2.jet(eta2(u))[1]
    return fp - f1p - f2p


@dataclass(frozen=True)
class ExtensivityReport:
    t: float
    s_exact: float
    eps0: float
    eps1: float
    eps2: float
    eps3: float
    bound: float
    satisfied: bool
    quad_err: float


def _sup_second_derivative(field: VectorField, samples: int = 10000) -> float:
    if field.support is None:
        lo, hi = 0.0, 2.0 * math.pi
    else:
        lo, hi = field.support
    grid = np.linspace(lo, hi, samples)
    return float(np.abs(field.jets(grid)[2]).max())


def extensivity_report(f1: VectorField, f2: VectorField, t: float,
                       c: float = 1.0, quad_tol: float = 1e-10,
                       cfg: FlowConfig = DEFAULT_CONFIG) -> ExtensivityReport:
    """Exact entropy deviation of f1 + f2 against the four-part bound."""
    if f1.support is None or f2.support is None:
        raise ValueError("extensivity needs compactly supported line fields")
    # order so that the first field's support ends first
    if f1.support[1] > f2.support[1]:
        f1, f2 = f2, f1
    b1 = f1.support[1]
    hull_lo = min(f1.support[0], f2.support[0])
    hull_hi = max(f1.support[1], f2.support[1])

    total = combine(f1, f2, 1.0, 1.0)
    rep_sum = entropy_half_line(exponentiate(total, 1.0, cfg), t, c,
                                STATE_VS_VACUUM, quad_tol)
    rep_1 = entropy_half_line(exponentiate(f1, 1.0, cfg), t, c,
                              STATE_VS_VACUUM, quad_tol)
    rep_2 = entropy_half_line(exponentiate(f2, 1.0, cfg), t, c,
                              STATE_VS_VACUUM, quad_tol)
    s_exact = rep_sum.value - rep_1.value - rep_2.value
    quad_err = rep_sum.quad_err + rep_1.quad_err + rep_2.quad_err

    norm1 = _sup_second_derivative(f1)
    norm2 = _sup_second_derivative(f2)
    width = hull_hi - hull_lo
    reach = max(b1 - t, 0.0)
    eps0 = (c / 24.0) * (norm1 + norm2) ** 2 * width**2 * reach**2 / 2.0
    eps1 = (c / 12.0) * math.sqrt(max(rep_1.value, 0.0) * eps0)
    eps2 = (c / 12.0) * math.sqrt(max(rep_2.value, 0.0) * eps0)
    eps3 = 2.0 * math.sqrt(max(rep_1.value, 0.0) * max(rep_2.value, 0.0))
    bound = eps0 + eps1 + eps2 + eps3
    return ExtensivityReport(
        t=t,
        s_exact=s_exact,
        eps0=eps0,
        eps1=eps1,
        eps2=eps2,
        eps3=eps3,
        bound=bound,
        satisfied=bool(abs(s_exact) <= bound + quad_err + 1e-12),
        quad_err=quad_err,
    )

"""Bott 2-cocycle, Virasoro central term and anomaly on the circle.

Circle diffeomorphisms are carried as lifts phi with phi(th+2pi) =
phi(th)+2pi, so the complex logarithm of the z-picture derivative has the
globally continuous branch

    log rho'(z) = log phi'(th) + i (phi(th) - th),

no unwrapping needed.  Writing psi for the lift of rho1 o rho2, the Bott
cocycle becomes the real angle integral

    B(rho1, rho2) = -(1/48 pi) int [ log psi' (phi2''/phi2')
                                     - (psi - th)(phi2' - 1) ] dth.

Central term and anomaly are likewise reduced to angle integrals: for angle
fields a, b (z-picture field F(z) = i z a(th)),

    omega(a, b) = -(1/48 pi) int [ a (b' + b''') - (a' + a''') b ] dth
    beta(rho, b) = -(1/24 pi) int b(th) [ S phi(th) + (phi'^2 - 1)/2 ] dth,

where S phi + (phi'^2 - 1)/2 is the z-picture Schwarzian transported to the
angle coordinate; it vanishes identically for rotations.  The central charge
is factored out of all three values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffeo import CIRCLE, Diffeomorphism, compose, schwarzian_array
from .fields import VectorField
from .quadrature import adaptive_quad

__all__ = [
    "CocycleValue",
    "bott_cocycle",
    "coboundary_check",
    "central_term_omega",
    "anomaly_beta",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CocycleValue:
    value: float
    quad_err: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and math.isfinite(self.quad_err)):
            raise ValueError("non-finite cocycle value")


def _require_circle(*maps: Diffeomorphism) -> None:
    for m in maps:
        if m.picture != CIRCLE:
            raise ValueError("cocycle integrals need circle-picture maps")


def _wrap_breakpoints(*objs) -> list[float]:
    pts: set[float] = set()
    for obj in objs:
        for p in getattr(obj, "breakpoints", ()) or ():
            pts.add(float(np.mod(p, TWO_PI)))
        for p in getattr(obj, "exceptional_points", ()) or ():
            pts.add(float(np.mod(p, TWO_PI)))
    return sorted(pts)


def bott_cocycle(rho1: Diffeomorphism, rho2: Diffeomorphism,
                 quad_tol: float = 1e-11) -> CocycleValue:
    """B(rho1, rho2), the phase cocycle of the projective composition law."""
    _require_circle(rho1, rho2)
    psi = compose(rho1, rho2)

    def integrand(th: np.ndarray) -> np.ndarray:
        rows2 = rho2.jets(th)
        rows_psi = psi.jets(th)
        d1 = rows2[:, 1]
        if np.any(d1 <= 0.0) or np.any(rows_psi[:, 1] <= 0.0):
            raise ValueError("orientation lost on the circle; cannot take log")
        return (np.log(rows_psi[:, 1]) * (rows2[:, 2] / d1)
                - (rows_psi[:, 0] - th) * (d1 - 1.0))

    raw, err = adaptive_quad(integrand, 0.0, TWO_PI, abs_tol=quad_tol,
                             breakpoints=_wrap_breakpoints(rho1, rho2, psi))
    scale = 1.0 / (48.0 * math.pi)
    return CocycleValue(-scale * raw, scale * err)


def coboundary_check(g1: Diffeomorphism, g2: Diffeomorphism,
                     g3: Diffeomorphism, quad_tol: float = 1e-11) -> float:
    """Group-cocycle residual of B on a triple; zero for the exact cocycle.

    Computes B(g1,g2) + B(g1 g2, g3) - B(g2,g3) - B(g1, g2 g3), the
    combination forced to vanish by associativity of the composition law.
    """
    _require_circle(g1, g2, g3)
    b12 = bott_cocycle(g1, g2, quad_tol)
    b12_3 = bott_cocycle(compose(g1, g2), g3, quad_tol)
    b23 = bott_cocycle(g2, g3, quad_tol)
    b1_23 = bott_cocycle(g1, compose(g2, g3), quad_tol)
    return b12.value + b12_3.value - b23.value - b1_23.value


def central_term_omega(f: VectorField, g: VectorField,
                       quad_tol: float = 1e-12) -> CocycleValue:
    """Antisymmetric central term of the smeared commutator, c factored out."""
    if f.picture != CIRCLE or g.picture != CIRCLE:
        raise ValueError("central term needs circle fields")

    def integrand(th: np.ndarray) -> np.ndarray:
        a, a1, _a2, a3 = f.jets(th)
        b, b1, _b2, b3 = g.jets(th)
        return a * (b1 + b3) - (a1 + a3) * b

    raw, err = adaptive_quad(integrand, 0.0, TWO_PI, abs_tol=quad_tol,
                             breakpoints=_wrap_breakpoints(f, g))
    scale = 1.0 / (48.0 * math.pi)
    return CocycleValue(-scale * raw, scale * err)


def anomaly_beta(rho: Diffeomorphism, g: VectorField,
                 quad_tol: float = 1e-11) -> CocycleValue:
    """Anomalous phase of conjugating a smeared field by V(rho), c factored out."""
    _require_circle(rho)
    if g.picture != CIRCLE:
        raise ValueError("anomaly needs a circle field")

    def integrand(th: np.ndarray) -> np.ndarray:
        b = g.jets(th)[0]
        rows = rho.jets(th)
        circ_schwarzian = schwarzian_array(rho, th) + 0.5 * (rows[:, 1] ** 2 - 1.0)
        return b * circ_schwarzian

    raw, err = adaptive_quad(integrand, 0.0, TWO_PI, abs_tol=quad_tol,
                             breakpoints=_wrap_breakpoints(rho, g))
    scale = 1.0 / (24.0 * math.pi)
    return CocycleValue(-scale * raw, scale * err)

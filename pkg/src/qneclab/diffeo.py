"""Orientation-preserving diffeomorphisms of the line and the circle.

Maps are immutable objects answering third-order jet queries, vectorized
over numpy arrays.  Circle maps are represented by their lift, an
increasing function with phi(th + 2*pi) = phi(th) + 2*pi.  Composition and
inversion propagate jets through the order-3 chain and inverse-function
rules; the Schwarzian derivative is computed from jets in the expanded form
rho'''/rho' - (3/2)(rho''/rho')^2 to avoid differentiating the ratio
numerically.

Every map tracks ``curvature_support``: a closed interval outside which it
is affine (so second and third derivatives vanish).  ``None`` means affine
everywhere.  Entropy and cocycle integrals use it to truncate their domains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Jet3",
    "Diffeomorphism",
    "AffineMap",
    "RotationMap",
    "ComposedMap",
    "NumericInverseMap",
    "ExplicitMap",
    "identity",
    "compose",
    "invert",
    "moebius_fixing",
    "schwarzian",
    "schwarzian_array",
    "log_derivative_ratio",
]

LINE = "line"
CIRCLE = "circle"


@dataclass(frozen=True)
class Jet3:
    """Value and first three derivatives of a diffeomorphism at a point."""

    value: float
    d1: float
    d2: float
    d3: float

    def __post_init__(self):
        for name in ("value", "d1", "d2", "d3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"non-finite jet component {name}")
        if self.d1 <= 0.0:
            raise ValueError(f"orientation violated: first derivative {self.d1} <= 0")


class Diffeomorphism:
    """Base class; subclasses implement ``jets``."""

    picture: str = LINE
    #: closed interval outside which the map is affine, or None
    curvature_support: tuple[float, float] | None = None
    #: coordinates where jets of order >= 2 may jump
    breakpoints: tuple[float, ...] = ()
    class_tags: frozenset = frozenset()
    #: optional ((point, derivative), ...) metadata for maps with known fixed points
    fixed_point_data: tuple[tuple[float, float], ...] | None = None

    def jets(self, us) -> np.ndarray:
        """Return an (n, 4) array of (value, d1, d2, d3) rows."""
        raise NotImplementedError

    def jet_at(self, u: float) -> Jet3:
        row = self.jets(np.array([u], dtype=float))[0]
        return Jet3(float(row[0]), float(row[1]), float(row[2]), float(row[3]))

    def __call__(self, u: float) -> float:
        return float(self.jets(np.array([u], dtype=float))[0, 0])

    def values(self, us) -> np.ndarray:
        return self.jets(us)[:, 0]

    def inverse(self, lo: float | None = None, hi: float | None = None) -> "Diffeomorphism":
        if lo is None or hi is None:
            lo, hi = self._default_bracket()
        return NumericInverseMap(self, float(lo), float(hi))

    def _default_bracket(self) -> tuple[float, float]:
        if self.curvature_support is not None:
            lo, hi = self.curvature_support
            pad = 1.0 + 0.1 * (hi - lo)
            return lo - pad, hi + pad
        return -1.0, 1.0


def _as_points(us) -> np.ndarray:
    return np.atleast_1d(np.asarray(us, dtype=float))


class AffineMap(Diffeomorphism):
    """u -> m*u + q with m > 0; the line's Moebius maps used in this package."""

    def __init__(self, m: float, q: float):
        if not (math.isfinite(m) and math.isfinite(q)):
            raise ValueError("non-finite affine coefficients")
        if m <= 0.0:
            raise ValueError(f"affine slope must be positive, got {m}")
        self.m = float(m)
        self.q = float(q)
        self.picture = LINE
        self.curvature_support = None
        self.class_tags = frozenset({"moebius"} | ({"identity"} if (m, q) == (1.0, 0.0) else set()))

    def jets(self, us) -> np.ndarray:
        us = _as_points(us)
        out = np.zeros((us.size, 4))
        out[:, 0] = self.m * us + self.q
        out[:, 1] = self.m
        return out

    def inverse(self, lo=None, hi=None) -> "AffineMap":
        return AffineMap(1.0 / self.m, -self.q / self.m)

    def __repr__(self):
        return f"AffineMap({self.m:g}, {self.q:g})"


class RotationMap(Diffeomorphism):
    """Circle rotation th -> th + alpha (a Moebius map of the circle)."""

    def __init__(self, alpha: float):
        if not math.isfinite(alpha):
            raise ValueError("non-finite rotation angle")
        self.alpha = float(alpha)
        self.picture = CIRCLE
        self.curvature_support = None
        self.class_tags = frozenset({"moebius"} | ({"identity"} if alpha == 0.0 else set()))

    def jets(self, us) -> np.ndarray:
        us = _as_points(us)
        out = np.zeros((us.size, 4))
        out[:, 0] = us + self.alpha
        out[:, 1] = 1.0
        return out

    def inverse(self, lo=None, hi=None) -> "RotationMap":
        return RotationMap(-self.alpha)

    def __repr__(self):
        return f"RotationMap({self.alpha:g})"


def identity(picture: str = LINE) -> Diffeomorphism:
    return AffineMap(1.0, 0.0) if picture == LINE else RotationMap(0.0)


def _compose_jets(outer_rows: np.ndarray, inner_rows: np.ndarray) -> np.ndarray:
    """Order-3 chain rule: jets of outer(inner) from jets of the factors."""
    s, s1, s2, s3 = inner_rows.T
    _, r1, r2, r3 = outer_rows.T
    out = np.empty_like(inner_rows)
    out[:, 0] = outer_rows[:, 0]
    out[:, 1] = r1 * s1
    out[:, 2] = r2 * s1**2 + r1 * s2
    out[:, 3] = r3 * s1**3 + 3.0 * r2 * s1 * s2 + r1 * s3
    return out


class ComposedMap(Diffeomorphism):
    def __init__(self, outer: Diffeomorphism, inner: Diffeomorphism):
        if outer.picture != inner.picture:
            raise ValueError(f"picture mismatch: {outer.picture} vs {inner.picture}")
        self.outer = outer
        self.inner = inner
        self.picture = outer.picture
        self.class_tags = frozenset({"composition"})
        self.curvature_support = self._curvature_support()
        self.breakpoints = self._breakpoints()

    def _curvature_support(self):
        pieces = []
        if self.inner.curvature_support is not None:
            pieces.append(self.inner.curvature_support)
        if self.outer.curvature_support is not None:
            # non-affine where inner lands in the outer's curved region
            lo, hi = self.outer.curvature_support
            inv = self.inner.inverse()
            pieces.append((inv(lo), inv(hi)))
        if not pieces:
            return None
        return (min(p[0] for p in pieces), max(p[1] for p in pieces))

    def _breakpoints(self):
        pts = list(self.inner.breakpoints)
        if self.outer.breakpoints:
            inv = self.inner.inverse()
            pts.extend(inv(p) for p in self.outer.breakpoints)
        return tuple(sorted(set(pts)))

    def jets(self, us) -> np.ndarray:
        inner_rows = self.inner.jets(us)
        outer_rows = self.outer.jets(inner_rows[:, 0])
        return _compose_jets(outer_rows, inner_rows)

    def inverse(self, lo=None, hi=None) -> Diffeomorphism:
        return ComposedMap(self.inner.inverse(lo, hi), self.outer.inverse(lo, hi))

    def __repr__(self):
        return f"ComposedMap({self.outer!r}, {self.inner!r})"


def _inverse_jets_from_forward(rows: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Inverse-function jets given forward jets ``rows`` at the preimages ``xs``."""
    _, r1, r2, r3 = rows.T
    out = np.empty_like(rows)
    out[:, 0] = xs
    out[:, 1] = 1.0 / r1
    out[:, 2] = -r2 / r1**3
    out[:, 3] = (3.0 * r2**2 - r1 * r3) / r1**5
    return out


class NumericInverseMap(Diffeomorphism):
    """Generic inverse: Newton with bisection fallback per query point."""

    def __init__(self, forward: Diffeomorphism, lo: float, hi: float,
                 tol: float = 1e-13, max_iter: int = 100):
        if hi <= lo:
            raise ValueError("need lo < hi for the inversion bracket")
        self.forward = forward
        self.lo = lo
        self.hi = hi
        self.tol = tol
        self.max_iter = max_iter
        self.picture = forward.picture
        self.class_tags = frozenset({"inverse"})
        if forward.curvature_support is not None:
            a, b = forward.curvature_support
            self.curvature_support = (forward(a), forward(b))
        else:
            self.curvature_support = None
        self.breakpoints = tuple(sorted(forward(p) for p in forward.breakpoints))

    def _solve(self, vs: np.ndarray) -> np.ndarray:
        fwd = self.forward
        lo = np.full_like(vs, self.lo)
        hi = np.full_like(vs, self.hi)
        flo = fwd.values(lo) - vs
        fhi = fwd.values(hi) - vs
        # widen brackets that do not straddle the target yet
        for _ in range(64):
            widen_lo = flo > 0.0
            widen_hi = fhi < 0.0
            if not (widen_lo.any() or widen_hi.any()):
                break
            span = hi - lo
            lo = np.where(widen_lo, lo - span, lo)
            hi = np.where(widen_hi, hi + span, hi)
            if widen_lo.any():
                flo[widen_lo] = fwd.values(lo[widen_lo]) - vs[widen_lo]
            if widen_hi.any():
                fhi[widen_hi] = fwd.values(hi[widen_hi]) - vs[widen_hi]
        else:
            raise ValueError("could not bracket inverse; map may not be onto")

        x = 0.5 * (lo + hi)
        for _ in range(self.max_iter):
            rows = fwd.jets(x)
            resid = rows[:, 0] - vs
            if np.all(np.abs(resid) <= self.tol * (1.0 + np.abs(vs))):
                break
            if np.any(rows[:, 1] <= 0.0):
                raise ValueError("non-monotonic samples detected during inversion")
            above = resid > 0.0
            hi = np.where(above, x, hi)
            lo = np.where(above, lo, x)
            step = resid / rows[:, 1]
            x_new = x - step
            outside = (x_new <= lo) | (x_new >= hi)
            x = np.where(outside, 0.5 * (lo + hi), x_new)
        return x

    def jets(self, us) -> np.ndarray:
        vs = _as_points(us)
        x = self._solve(vs)
        rows = self.forward.jets(x)
        return _inverse_jets_from_forward(rows, x)

    def inverse(self, lo=None, hi=None) -> Diffeomorphism:
        return self.forward

    def __repr__(self):
        return f"NumericInverseMap({self.forward!r})"


class ExplicitMap(Diffeomorphism):
    """Diffeomorphism given by a closed-form vectorized jet function."""

    def __init__(self, jet_fn, picture: str = LINE,
                 curvature_support: tuple[float, float] | None = None,
                 breakpoints: tuple[float, ...] = (),
                 fixed_point_data=None, label: str = "explicit",
                 inverse_jet_fn=None):
        self._jet_fn = jet_fn
        self._inverse_jet_fn = inverse_jet_fn
        self.picture = picture
        self.curvature_support = curvature_support
        self.breakpoints = tuple(breakpoints)
        self.fixed_point_data = fixed_point_data
        self.label = label
        self.class_tags = frozenset({"explicit"})

    def jets(self, us) -> np.ndarray:
        us = _as_points(us)
        rows = self._jet_fn(us)
        return np.asarray(rows, dtype=float)

    def inverse(self, lo=None, hi=None) -> Diffeomorphism:
        if self._inverse_jet_fn is not None:
            return ExplicitMap(self._inverse_jet_fn, picture=self.picture,
                               label=f"{self.label}^-1", inverse_jet_fn=self._jet_fn)
        return super().inverse(lo, hi)

    def __repr__(self):
        return f"ExplicitMap({self.label})"


def compose(outer: Diffeomorphism, inner: Diffeomorphism) -> Diffeomorphism:
    """outer after inner, with jets per the order-3 chain rule."""
    if outer.picture != inner.picture:
        raise ValueError(f"picture mismatch: {outer.picture} vs {inner.picture}")
    if isinstance(outer, AffineMap) and isinstance(inner, AffineMap):
        return AffineMap(outer.m * inner.m, outer.m * inner.q + outer.q)
    if isinstance(outer, RotationMap) and isinstance(inner, RotationMap):
        return RotationMap(outer.alpha + inner.alpha)
    return ComposedMap(outer, inner)


def invert(rho: Diffeomorphism, lo: float | None = None,
           hi: float | None = None) -> Diffeomorphism:
    """Inverse map; exact for flows and affine maps, Newton-based otherwise."""
    return rho.inverse(lo, hi)


def moebius_fixing(a: float, b: float, pa: float, pb: float) -> AffineMap:
    """The affine map sending pa -> a and pb -> b."""
    if pa == pb:
        raise ValueError("degenerate data: pa == pb")
    m = (b - a) / (pb - pa)
    if m <= 0:
        raise ValueError("data would need an orientation-reversing map")
    return AffineMap(m, a - m * pa)


def schwarzian_array(rho: Diffeomorphism, us) -> np.ndarray:
    rows = rho.jets(us)
    ratio = rows[:, 2] / rows[:, 1]
    return rows[:, 3] / rows[:, 1] - 1.5 * ratio**2


def schwarzian(rho: Diffeomorphism, u: float) -> float:
    """S rho(u) = rho'''/rho' - (3/2)(rho''/rho')^2."""
    return float(schwarzian_array(rho, np.array([u], dtype=float))[0])


def log_derivative_ratio(rho: Diffeomorphism, u: float) -> float:
    """rho''(u)/rho'(u), the derivative of log rho'."""
    jet = rho.jet_at(u)
    return jet.d2 / jet.d1

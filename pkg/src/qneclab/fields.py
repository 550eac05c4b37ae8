"""Real vector fields on the line and on the circle.

A field is an immutable object returning the jet (f, f', f'', f''') at any
coordinate, vectorized over numpy arrays.  Line fields are compactly
supported and vanish identically outside their support; circle fields are
parametrized by the angle and wrap modulo 2*pi.  Jets come from the analytic
closed forms of the named constructors, never from numerical
differentiation, because downstream flow transport needs f''' at full
accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "VectorField",
    "make_bump",
    "make_cos2",
    "make_trigpoly",
    "zero_field",
    "combine",
    "eval_jet",
    "cayley_pushforward",
    "sobolev_norm",
    "field_from_spec",
]

LINE = "line"
CIRCLE = "circle"

JetArrays = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class VectorField:
    """A real vector field with jets to third order.

    ``support`` is a closed interval outside which the field vanishes
    (coordinates for line fields, unwrapped angles for circle fields);
    ``None`` means the whole circle.  ``exceptional_points`` lists the
    finitely many coordinates where the field is only C^1; jets queried
    there return the one-sided limit from inside the support.
    """

    picture: str
    support: tuple[float, float] | None
    _jet_fn: Callable[[np.ndarray], JetArrays]
    exceptional_points: tuple[float, ...] = ()
    smoothness: str = "smooth"
    label: str = dc_field(default="field", compare=False)

    def jets(self, us) -> JetArrays:
        """Vectorized jet evaluation: four arrays (f, f', f'', f''')."""
        us = np.asarray(us, dtype=float)
        if self.picture == CIRCLE:
            us = self._wrap(us)
        return self._jet_fn(us)

    def jet(self, u: float) -> tuple[float, float, float, float]:
        f, f1, f2, f3 = self.jets(np.array([u], dtype=float))
        return float(f[0]), float(f1[0]), float(f2[0]), float(f3[0])

    def __call__(self, u: float) -> float:
        return self.jet(u)[0]

    def _wrap(self, us: np.ndarray) -> np.ndarray:
        if self.support is None:
            return np.mod(us, 2.0 * np.pi)
        # wrap into [center - pi, center + pi) around the support arc
        lo, hi = self.support
        center = 0.5 * (lo + hi)
        return np.mod(us - center + np.pi, 2.0 * np.pi) + center - np.pi

    def contains(self, u: float) -> bool:
        """Whether ``u`` lies in the (closed) support."""
        if self.support is None:
            return True
        arr = self._wrap(np.array([u], dtype=float)) if self.picture == CIRCLE \
            else np.array([u], dtype=float)
        return bool(self.support[0] <= arr[0] <= self.support[1])

    def jet_discontinuous_at(self, u: float, atol: float = 1e-12) -> bool:
        """Flags coordinates where second/third derivatives jump."""
        return any(abs(u - z) <= atol for z in self.exceptional_points)


def _check_finite(*params: float) -> None:
    for p in params:
        if not math.isfinite(p):
            raise ValueError(f"non-finite field parameter {p!r}")


def make_bump(center: float, halfwidth: float, amplitude: float) -> VectorField:
    """Standard smooth bump ``A * exp(1 - 1/(1 - x^2))``, x=(u-center)/halfwidth."""
    _check_finite(center, halfwidth, amplitude)
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")

    c, h, amp = float(center), float(halfwidth), float(amplitude)

    def jet_fn(us: np.ndarray) -> JetArrays:
        x = (us - c) / h
        f = np.zeros_like(us)
        f1 = np.zeros_like(us)
        f2 = np.zeros_like(us)
        f3 = np.zeros_like(us)
        m = np.abs(x) < 1.0
        if m.any():
            xm = x[m]
            w = 1.0 - xm * xm
            g = np.exp(1.0 - 1.0 / w)
            # g'/g = p, with p and its derivatives in x:
            p = -2.0 * xm / w**2
            p1 = -2.0 / w**2 - 8.0 * xm * xm / w**3
            p2 = -24.0 * xm / w**3 - 48.0 * xm**3 / w**4
            f[m] = amp * g
            f1[m] = amp * g * p / h
            f2[m] = amp * g * (p * p + p1) / h**2
            f3[m] = amp * g * (p**3 + 3.0 * p * p1 + p2) / h**3
        return f, f1, f2, f3

    return VectorField(
        picture=LINE,
        support=(c - h, c + h),
        _jet_fn=jet_fn,
        label=f"bump({c:g},{h:g},{amp:g})",
    )


def make_cos2() -> VectorField:
    """cos^2(u) on [-pi/2, pi/2] and zero outside.

    C^1 with vanishing value and slope at +-pi/2 but a jump in the second
    derivative there, hence piecewise-C1 with those two exceptional points.
    """
    half = np.pi / 2

    def jet_fn(us: np.ndarray) -> JetArrays:
        f = np.zeros_like(us)
        f1 = np.zeros_like(us)
        f2 = np.zeros_like(us)
        f3 = np.zeros_like(us)
        m = np.abs(us) <= half
        if m.any():
            um = us[m]
            f[m] = np.cos(um) ** 2
            f1[m] = -np.sin(2.0 * um)
            f2[m] = -2.0 * np.cos(2.0 * um)
            f3[m] = 4.0 * np.sin(2.0 * um)
        return f, f1, f2, f3

    return VectorField(
        picture=LINE,
        support=(-half, half),
        _jet_fn=jet_fn,
        exceptional_points=(-half, half),
        smoothness="piecewise-C1",
        label="cos2",
    )


def make_trigpoly(cos: Sequence[float] = (), sin: Sequence[float] = ()) -> VectorField:
    """Circle field ``sum_k cos[k] cos(k th) + sin[k] sin(k th)``.

    Coefficient lists are indexed by the harmonic k starting at 0; the
    sin[0] entry multiplies sin(0) and therefore has no effect.
    """
    cos = tuple(float(x) for x in cos)
    sin = tuple(float(x) for x in sin)
    _check_finite(*cos, *sin)

    def jet_fn(th: np.ndarray) -> JetArrays:
        f = np.zeros_like(th)
        f1 = np.zeros_like(th)
        f2 = np.zeros_like(th)
        f3 = np.zeros_like(th)
        for k, a in enumerate(cos):
            if a == 0.0:
                continue
            f += a * np.cos(k * th)
            f1 += -a * k * np.sin(k * th)
            f2 += -a * k**2 * np.cos(k * th)
            f3 += a * k**3 * np.sin(k * th)
        for k, b in enumerate(sin):
            if b == 0.0 or k == 0:
                continue
            f += b * np.sin(k * th)
            f1 += b * k * np.cos(k * th)
            f2 += -b * k**2 * np.sin(k * th)
            f3 += -b * k**3 * np.cos(k * th)
        return f, f1, f2, f3

    return VectorField(
        picture=CIRCLE,
        support=None,
        _jet_fn=jet_fn,
        label=f"trigpoly(cos={list(cos)},sin={list(sin)})",
    )


def zero_field(picture: str = LINE) -> VectorField:
    def jet_fn(us: np.ndarray) -> JetArrays:
        z = np.zeros_like(us)
        return z, z.copy(), z.copy(), z.copy()

    support = (0.0, 0.0) if picture == LINE else None
    return VectorField(picture=picture, support=support, _jet_fn=jet_fn,
                       label="zero")


def eval_jet(field: VectorField, u: float, order: int):
    """Jet of ``field`` at ``u`` truncated to ``order`` (0..3).

    At an exceptional point of a piecewise-C1 field the returned second and
    third derivatives are the one-sided limits from inside the support; use
    ``field.jet_discontinuous_at(u)`` to detect that case.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"jet order must be 0..3, got {order}")
    return field.jet(u)[: order + 1]


def combine(f1: VectorField, f2: VectorField, a: float, b: float) -> VectorField:
    """Pointwise linear combination ``a*f1 + b*f2`` with jets combined linearly."""
    if f1.picture != f2.picture:
        raise ValueError(f"picture mismatch: {f1.picture} vs {f2.picture}")
    _check_finite(a, b)
    a, b = float(a), float(b)

    if f1.support is None or f2.support is None:
        support = None
    else:
        support = (min(f1.support[0], f2.support[0]),
                   max(f1.support[1], f2.support[1]))

    def jet_fn(us: np.ndarray) -> JetArrays:
        j1 = f1.jets(us)
        j2 = f2.jets(us)
        return tuple(a * x + b * y for x, y in zip(j1, j2))  # type: ignore[return-value]

    exceptional = tuple(sorted(set(f1.exceptional_points) | set(f2.exceptional_points)))
    smooth = "smooth" if not exceptional else "piecewise-C1"
    return VectorField(
        picture=f1.picture,
        support=support,
        _jet_fn=jet_fn,
        exceptional_points=exceptional,
        smoothness=smooth,
        label=f"{a:g}*{f1.label}+{b:g}*{f2.label}",
    )


def cayley_pushforward(field: VectorField) -> VectorField:
    """Push a line field forward to the circle through C(u) = (1+iu)/(1-iu).

    With e^{i th} = C(u) one has u(th) = tan(th/2), and the pushed-forward
    angular field is g(th) = (1 + cos th) * f(tan(th/2)).  The point th=pi
    is the image of infinity, where a compactly supported field vanishes.
    """
    if field.picture != LINE:
        raise ValueError("cayley_pushforward expects a line field")
    if field.support is None:
        raise ValueError("line field must carry a support interval")

    def angle(u: float) -> float:
        return 2.0 * math.atan(u)

    lo, hi = field.support
    supp = (angle(lo), angle(hi))

    def jet_fn(th: np.ndarray) -> JetArrays:
        g = np.zeros_like(th)
        g1 = np.zeros_like(th)
        g2 = np.zeros_like(th)
        g3 = np.zeros_like(th)
        half = th / 2.0
        # guard the pole at th = +-pi before calling tan
        near_pole = np.abs(np.cos(half)) < 1e-12
        u = np.where(near_pole, np.inf, np.tan(half))
        m = (u >= lo) & (u <= hi) & ~near_pole
        if m.any():
            um = u[m]
            thm = th[m]
            f, f1, f2, f3 = field.jets(um)
            s = 1.0 + np.cos(thm)
            s1 = -np.sin(thm)
            s2 = -np.cos(thm)
            s3 = np.sin(thm)
            up = 0.5 * (1.0 + um * um)          # du/dth
            upp = um * up                        # d2u/dth2
            uppp = up * up + um * um * up        # d3u/dth3
            fu1 = f1 * up
            fu2 = f2 * up * up + f1 * upp
            fu3 = f3 * up**3 + 3.0 * f2 * up * upp + f1 * uppp
            g[m] = s * f
            g1[m] = s1 * f + s * fu1
            g2[m] = s2 * f + 2.0 * s1 * fu1 + s * fu2
            g3[m] = s3 * f + 3.0 * s2 * fu1 + 3.0 * s1 * fu2 + s * fu3
        return g, g1, g2, g3

    return VectorField(
        picture=CIRCLE,
        support=supp,
        _jet_fn=jet_fn,
        exceptional_points=tuple(angle(z) for z in field.exceptional_points),
        smoothness=field.smoothness,
        label=f"cayley*{field.label}",
    )


def sobolev_norm(field: VectorField, s: float, n_modes: int = 1024) -> float:
    """Partial sum of the first-order Sobolev norm sum_n |f_n| (1+|n|)^s.

    Fourier coefficients come from an ``n_modes``-point uniform discrete
    transform, so modes beyond n_modes/2 are aliased; the sum is monotone
    nondecreasing in n_modes up to that error.
    """
    if field.picture != CIRCLE:
        raise ValueError("sobolev_norm expects a circle field")
    if n_modes < 16:
        raise ValueError("n_modes must be at least 16")
    th = np.linspace(0.0, 2.0 * np.pi, n_modes, endpoint=False)
    vals = field.jets(th)[0]
    coeffs = np.fft.fft(vals) / n_modes
    freqs = np.fft.fftfreq(n_modes, d=1.0 / n_modes)
    return float(np.sum(np.abs(coeffs) * (1.0 + np.abs(freqs)) ** s))


def field_from_spec(spec: dict) -> VectorField:
    """Build a field from the JSON field-spec dialect used by the CLI.

    Recognized forms:
      {"kind": "bump", "center": x, "halfwidth": w, "amplitude": a}
      {"kind": "cos2"}
      {"kind": "trigpoly", "cos": [...], "sin": [...]}
      {"kind": "sum", "terms": [{...spec..., "coef": c}, ...]}
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("field spec must be an object with a 'kind' key")
    kind = spec["kind"]
    if kind == "bump":
        try:
            return make_bump(float(spec["center"]), float(spec["halfwidth"]),
                             float(spec["amplitude"]))
        except KeyError as exc:
            raise ValueError(f"bump spec missing {exc}") from exc
    if kind == "cos2":
        return make_cos2()
    if kind == "trigpoly":
        return make_trigpoly(spec.get("cos", ()), spec.get("sin", ()))
    if kind == "sum":
        terms = spec.get("terms", [])
        if not isinstance(terms, list):
            raise ValueError("'terms' must be a list")
        total: VectorField | None = None
        for term in terms:
            coef = float(term.get("coef", 1.0))
            sub = field_from_spec(term)
            if total is None:
                total = combine(sub, zero_field(sub.picture), coef, 0.0)
            else:
                total = combine(total, sub, 1.0, coef)
        return total if total is not None else zero_field()
    raise ValueError(f"unknown field kind {kind!r}")

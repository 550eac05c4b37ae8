"""Exponential flows of vector fields and their third-order jets.

The flow rho_t = Exp(t f) solves d/dt rho_t(u) = f(rho_t(u)) with rho_0 the
identity.  Jets in u are transported along each trajectory by the
variational system

    d/dt rho'   = f'(rho) rho'
    d/dt rho''  = f''(rho) rho'^2 + f'(rho) rho''
    d/dt rho''' = f'''(rho) rho'^3 + 3 f''(rho) rho' rho'' + f'(rho) rho'''

integrated with an adaptive embedded Runge-Kutta scheme (DOP853).  Points
outside the field's support never move and get exact identity jets without
touching the integrator.  Batches of query points share one integrator call,
which is what makes quadrature over flow jets affordable.

Where the field does not vanish the flow also has the classical quadrature
form: rho_t(u) inverts s -> integral_u^s dv/f(v) at value t, implemented in
``closed_form_flow`` as an independent cross-check of the ODE path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .diffeo import CIRCLE, Diffeomorphism, Jet3, _as_points
from .fields import VectorField
from .quadrature import adaptive_quad

__all__ = [
    "FlowConfig",
    "FlowError",
    "FlowMap",
    "exponentiate",
    "flow_jet",
    "inverse_flow",
    "closed_form_flow",
]


class FlowError(RuntimeError):
    """ODE integration failure; message names the point and flow time."""


@dataclass(frozen=True)
class FlowConfig:
    # local error control an order tighter than the 1e-8 jet accuracy the
    # round-trip and transport invariants demand of strong flows
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_step: float | None = None  # None: 0.05 * support width
    method: str = "adaptive-embedded-runge-kutta"

    def __post_init__(self):
        if not (self.abs_tol > 0 and np.isfinite(self.abs_tol)):
            raise ValueError("abs_tol must be positive and finite")
        if not (self.rel_tol > 0 and np.isfinite(self.rel_tol)):
            raise ValueError("rel_tol must be positive and finite")
        if self.max_step is not None and not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.method != "adaptive-embedded-runge-kutta":
            raise ValueError(f"unknown flow method {self.method!r}")


DEFAULT_CONFIG = FlowConfig()


def _support_width(field: VectorField) -> float:
    if field.support is None:
        return 2.0 * np.pi
    lo, hi = field.support
    return max(hi - lo, 1e-6)


_MAX_RHS_EVALS = 2_000_000
_BATCH_CHUNK = 2048


def _integrate_batch(field: VectorField, t: float, us: np.ndarray,
                     cfg: FlowConfig) -> np.ndarray:
    if us.size > _BATCH_CHUNK:
        # keep step-size control local: one runaway point should not force
        # tiny steps on a hundred thousand others
        parts = [
            _integrate_batch(field, t, us[i:i + _BATCH_CHUNK], cfg)
            for i in range(0, us.size, _BATCH_CHUNK)
        ]
        return np.concatenate(parts, axis=0)
    n = us.size
    y0 = np.concatenate([us, np.ones(n), np.zeros(n), np.zeros(n)])
    evals = [0]

    def rhs(_t, y):
        evals[0] += 1
        if evals[0] > _MAX_RHS_EVALS:
            raise FlowError(
                f"flow integration stalled near t={_t:.6g} for points near "
                f"u={us[0]!r} (evaluation budget exhausted)")
        r = y[:n]
        r1 = y[n:2 * n]
        r2 = y[2 * n:3 * n]
        r3 = y[3 * n:]
        f, f1, f2, f3 = field.jets(r)
        out = np.concatenate([
            f,
            f1 * r1,
            f2 * r1 * r1 + f1 * r2,
            f3 * r1**3 + 3.0 * f2 * r1 * r2 + f1 * r3,
        ])
        if not np.all(np.isfinite(out)):
            raise FlowError(
                f"field jets not finite at t={_t:.6g} along the trajectory "
                f"from u={us[0]!r}")
        return out

    max_step = cfg.max_step if cfg.max_step is not None \
        else 0.05 * _support_width(field)
    sol = solve_ivp(rhs, (0.0, t), y0, method="DOP853",
                    rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=max_step)
    if not sol.success:
        raise FlowError(
            f"flow integration failed at t={t} for points near "
            f"u={us[0]!r}: {sol.message}")
    y = sol.y[:, -1]
    rows = np.stack([y[:n], y[n:2 * n], y[2 * n:3 * n], y[3 * n:]], axis=1)
    if np.any(rows[:, 1] <= 0.0):
        raise FlowError(f"orientation lost during flow at t={t}")
    return rows


class FlowMap(Diffeomorphism):
    """The diffeomorphism Exp(t f), with cached ODE-transported jets."""

    def __init__(self, field: VectorField, t: float, cfg: FlowConfig = DEFAULT_CONFIG):
        if not np.isfinite(t):
            raise ValueError("flow time must be finite")
        self.field = field
        self.t = float(t)
        self.cfg = cfg
        self.picture = field.picture
        self.class_tags = frozenset({"flow"})
        self.curvature_support = field.support
        self.breakpoints = tuple(field.exceptional_points)
        self._cache: dict[float, np.ndarray] = {}
        self._inv: FlowMap | None = None

    def jets(self, us) -> np.ndarray:
        us = _as_points(us)
        rows = np.empty((us.size, 4))
        rows[:, 0] = us
        rows[:, 1] = 1.0
        rows[:, 2] = 0.0
        rows[:, 3] = 0.0
        if self.t == 0.0:
            return rows
        if self.field.support is not None and self.picture != CIRCLE:
            lo, hi = self.field.support
            inside = (us >= lo) & (us <= hi)
        else:
            inside = np.ones(us.size, dtype=bool)
        if not inside.any():
            return rows
        todo_idx = []
        todo_pts = []
        for i in np.nonzero(inside)[0]:
            key = float(us[i])
            cached = self._cache.get(key)
            if cached is not None:
                rows[i] = cached
            else:
                todo_idx.append(i)
                todo_pts.append(key)
        if todo_pts:
            fresh = _integrate_batch(self.field, self.t,
                                     np.asarray(todo_pts), self.cfg)
            for i, key, row in zip(todo_idx, todo_pts, fresh):
                rows[i] = row
                self._cache[key] = row
        return rows

    def inverse(self, lo=None, hi=None) -> "FlowMap":
        if self._inv is None:
            self._inv = FlowMap(self.field, -self.t, self.cfg)
            self._inv._inv = self
        return self._inv

    def __repr__(self):
        return f"FlowMap({self.field.label}, t={self.t:g})"


def exponentiate(field: VectorField, t: float,
                 cfg: FlowConfig = DEFAULT_CONFIG) -> FlowMap:
    """The one-parameter flow Exp(t f) as a Diffeomorphism."""
    return FlowMap(field, t, cfg)


def flow_jet(field: VectorField, t: float, u: float,
             cfg: FlowConfig = DEFAULT_CONFIG) -> Jet3:
    """Third-order jet of Exp(t f) at the point u."""
    return exponentiate(field, t, cfg).jet_at(u)


def inverse_flow(field: VectorField, t: float,
                 cfg: FlowConfig = DEFAULT_CONFIG) -> FlowMap:
    """Exp(-t f), the inverse of Exp(t f)."""
    return FlowMap(field, -t, cfg)


def _nearest_zeros(field: VectorField, u: float, n_scan: int = 4096):
    """Zero-free interval of f around u, by sign scan plus bisection."""
    lo, hi = field.support if field.support is not None else (u - np.pi, u + np.pi)
    grid = np.linspace(lo, hi, n_scan)
    vals = field.jets(grid)[0]
    sign_u = np.sign(field.jet(u)[0])

    def refine(a, b):
        fa = field.jet(a)[0]
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = field.jet(m)[0]
            if fm == 0.0 or (b - a) < 1e-15 * max(1.0, abs(m)):
                return m
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        return 0.5 * (a + b)

    zlo, zhi = lo, hi
    below = grid[grid < u]
    vals_below = vals[grid < u]
    for i in range(below.size - 1, 0, -1):
        if np.sign(vals_below[i - 1]) != sign_u or vals_below[i - 1] == 0.0:
            zlo = refine(below[i - 1], below[i])
            break
    above = grid[grid > u]
    vals_above = vals[grid > u]
    for i in range(above.size - 1):
        if np.sign(vals_above[i + 1]) != sign_u or vals_above[i + 1] == 0.0:
            zhi = refine(above[i], above[i + 1])
            break
    return zlo, zhi


def closed_form_flow(field: VectorField, t: float, u: float,
                     tol: float = 1e-12) -> float:
    """Flow value from the quadrature form, where f does not vanish.

    Inverts F_u(s) = integral_u^s dv/f(v) at the value t by bracketing plus
    Newton with bisection fallback; F_u is strictly monotone on the maximal
    zero-free interval around u, and blows up logarithmically toward the
    nearest zeros, so the solution is always strictly inside.
    """
    fu = field.jet(u)[0]
    if fu == 0.0 or not np.isfinite(fu):
        raise ValueError(
            f"f vanishes at u={u}; closed-form flow undefined, use the ODE path")
    if t == 0.0:
        return float(u)

    zlo, zhi = _nearest_zeros(field, u)
    brk = [p for p in field.exceptional_points if zlo < p < zhi]

    def F(a, b):
        val, _err = adaptive_quad(lambda vs: 1.0 / field.jets(vs)[0], a, b,
                                  abs_tol=1e-13 * max(1.0, abs(t)),
                                  breakpoints=brk)
        return val

    # expand a bracket [s_lo, s_hi] with g = F_u - t changing sign across it
    direction = 1.0 if (t * fu) > 0 else -1.0
    edge = zhi if direction > 0 else zlo
    s_prev, g_prev = u, -t
    acc = 0.0  # accumulated F_u(s_prev)
    step = fu * t
    bracket = None
    for _ in range(200):
        s_cand = s_prev + step
        if (direction > 0 and s_cand >= edge) or (direction < 0 and s_cand <= edge):
            s_cand = s_prev + 0.75 * (edge - s_prev)
        acc_cand = acc + F(s_prev, s_cand)
        g_cand = acc_cand - t
        if np.sign(g_cand) != np.sign(g_prev):
            bracket = (s_prev, s_cand) if s_cand > s_prev else (s_cand, s_prev)
            g_bracket = (g_prev, g_cand) if s_cand > s_prev else (g_cand, g_prev)
            acc_at = {s_prev: acc, s_cand: acc_cand}
            break
        s_prev, g_prev, acc = s_cand, g_cand, acc_cand
        step *= 2.0
    else:
        raise ValueError(
            f"could not bracket the flow target from u={u}, t={t}; "
            "f may vanish on the trajectory")

    s_lo, s_hi = bracket
    g_lo, g_hi = g_bracket
    orient = 1.0 if fu > 0 else -1.0  # F_u is increasing iff f > 0
    x = s_lo + (s_hi - s_lo) * abs(g_lo) / (abs(g_lo) + abs(g_hi))
    gx = acc_at[s_lo] + F(s_lo, x) - t
    for _ in range(100):
        if abs(gx) <= tol * (1.0 + abs(t)):
            break
        if gx * orient > 0:
            s_hi, g_hi = x, gx
        else:
            s_lo, g_lo = x, gx
        fx = field.jet(x)[0]
        x_new = x - gx * fx  # Newton: dF/ds = 1/f
        if not (s_lo < x_new < s_hi):
            x_new = 0.5 * (s_lo + s_hi)
        gx = gx + F(x, x_new)
        x = x_new
        if (s_hi - s_lo) < 1e-15 * max(1.0, abs(x)):
            break
    return float(x)

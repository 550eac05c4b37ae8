"""Command-line surface: scans, verification suites, machine-readable output.

Subcommands: entropy, flow, counterexample, bekenstein, cocycle-check,
extensivity, verify.  CSV output uses '.' decimals, '\\n' line endings and
always carries a header row, so identical command plus seed gives
byte-identical files.  The environment variable QNECLAB_THREADS caps the
worker count for grid scans (default 1; rows are assembled in input order
either way).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import click
import numpy as np

from . import asymptotics, cocycles, entropy, verify
from .diffeo import identity
from .fields import field_from_spec, make_cos2
from .flows import FlowConfig, FlowError, closed_form_flow, exponentiate
from .quadrature import QuadratureError

EXIT_PROPERTY_VIOLATION = 1
EXIT_INVALID_SPEC = 2
EXIT_NUMERICAL_FAILURE = 3


@dataclass(frozen=True)
class RunConfig:
    central_charge: float = 1.0
    quad_tol: float = 1e-10
    ode_abs_tol: float = 1e-12
    ode_rel_tol: float = 1e-10
    output: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if not self.central_charge > 0:
            raise ValueError("central charge must be positive")
        if not (self.quad_tol > 0 and self.ode_abs_tol > 0 and self.ode_rel_tol > 0):
            raise ValueError("tolerances must be positive")

    @property
    def flow_config(self) -> FlowConfig:
        return FlowConfig(abs_tol=self.ode_abs_tol, rel_tol=self.ode_rel_tol)


def _n_workers() -> int:
    raw = os.environ.get("QNECLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_rows(fn, items):
    workers = _n_workers()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(header: list[str], rows: list[list], out: str | None,
                fmt: str) -> None:
    for row in rows:
        for cell in row:
            if isinstance(cell, float) and math.isnan(cell):
                click.echo("error: NaN in output row", err=True)
                sys.exit(EXIT_NUMERICAL_FAILURE)
    if fmt == "json":
        payload = {"columns": header,
                   "rows": [[c for c in row] for row in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(c) for c in row])
        text = buf.getvalue()
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _load_field(path: str):
    try:
        with open(path) as fh:
            spec = json.load(fh)
        return field_from_spec(spec)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        click.echo(f"error: invalid field spec: {exc}", err=True)
        sys.exit(EXIT_INVALID_SPEC)


def _numerical_guard(fn):
    try:
        return fn()
    except (FlowError, QuadratureError, FloatingPointError) as exc:
        click.echo(f"error: numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL_FAILURE)


_common_options = [
    click.option("--c", "central_charge", type=float, default=1.0,
                 show_default=True, help="central charge"),
    click.option("--quad-tol", type=float, default=1e-10, show_default=True,
                 help="absolute quadrature tolerance"),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="seed for randomized suites"),
    click.option("--out", type=click.Path(dir_okay=False), default=None,
                 help="output file (default: stdout)"),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
                 default="csv", show_default=True),
]


def common_options(fn):
    for opt in reversed(_common_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Entropy, flow and cocycle numerics for diffeomorphism-induced states."""


@main.command("entropy")
@click.option("--field", "field_path", required=True, type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(["half-line", "interval"]),
              default="half-line", show_default=True)
@click.option("--direction",
              type=click.Choice([entropy.STATE_VS_VACUUM, entropy.VACUUM_VS_STATE]),
              default=entropy.STATE_VS_VACUUM, show_default=True)
@click.option("--t0", type=float, default=-2.0, show_default=True,
              help="grid start (cut t, or radius r for intervals)")
@click.option("--t1", type=float, default=2.0, show_default=True)
@click.option("--steps", type=int, default=41, show_default=True)
@common_options
def cmd_entropy(field_path, kind, direction, t0, t1, steps,
                central_charge, quad_tol, seed, out, fmt):
    """Scan S, S', S'' on a half-line or interval grid."""
    field = _load_field(field_path)
    cfg = RunConfig(central_charge=central_charge, quad_tol=quad_tol, seed=seed)
    rho = exponentiate(field, 1.0, cfg.flow_config)
    grid = np.linspace(t0, t1, steps)

    if kind == "half-line":
        def one(t: float):
            rep = entropy.entropy_half_line(rho, t, central_charge, direction,
                                            quad_tol)
            if direction == entropy.STATE_VS_VACUUM:
                s1, s2 = entropy.entropy_half_line_derivatives(
                    rho, t, central_charge, quad_tol)
            else:
                eta = rho.inverse()
                s1, s2 = entropy.entropy_exchanged_derivative_formula(
                    rho, eta(t), central_charge, quad_tol)
            return [t, rep.value, s1, s2, rep.quad_err]

        rows = _numerical_guard(lambda: _map_rows(one, [float(t) for t in grid]))
        _write_rows(["t_or_r", "value", "derivative1", "derivative2", "quad_err"],
                    rows, out, fmt)
    else:
        radii = [float(r) for r in grid if r > 0]
        if not radii:
            click.echo("error: interval scan needs positive radii", err=True)
            sys.exit(EXIT_INVALID_SPEC)

        def one_interval(r: float):
            rec = entropy.bekenstein_check(rho, r, central_charge, direction,
                                           quad_tol)
            return [r, rec.entropy, rec.quad_err, rec.margin]

        raw = _numerical_guard(lambda: _map_rows(one_interval, radii))
        values = [row[1] for row in raw]
        rows = []
        for i, (r, value, err, margin) in enumerate(raw):
            # FD derivatives of S(r) along the scan grid
            if len(raw) >= 3:
                j = min(max(i, 1), len(raw) - 2)
                hstep = raw[1][0] - raw[0][0]
                d1 = (values[j + 1] - values[j - 1]) / (2 * hstep)
                d2 = (values[j + 1] - 2 * values[j] + values[j - 1]) / hstep**2
            else:
                d1 = d2 = 0.0
            rows.append([r, value, d1, d2, err, margin])
        _write_rows(["t_or_r", "value", "derivative1", "derivative2",
                     "quad_err", "margin"], rows, out, fmt)


@main.command("flow")
@click.option("--field", "field_path", required=True, type=click.Path(exists=True))
@click.option("--t", type=float, required=True, help="flow time")
@click.option("--u", type=float, required=True, help="query point")
@click.option("--jet", is_flag=True, help="print the full third-order jet")
@click.option("--closed-form", is_flag=True,
              help="use the quadrature inversion instead of the ODE")
def cmd_flow(field_path, t, u, jet, closed_form):
    """Evaluate the flow Exp(t f) at a point."""
    field = _load_field(field_path)

    def run():
        if closed_form:
            return [closed_form_flow(field, t, u)]
        rho = exponentiate(field, t)
        j = rho.jet_at(u)
        return [j.value, j.d1, j.d2, j.d3] if jet else [j.value]

    values = _numerical_guard(run)
    click.echo(" ".join(repr(v) for v in values))


@main.command("counterexample")
@click.option("--c", "central_charge", type=float, default=1.0, show_default=True)
def cmd_counterexample(central_charge):
    """Reproduce the convexity counterexample chain for the cos^2 field."""
    c = central_charge
    field = make_cos2()
    rho = exponentiate(field, 1.0)

    def run():
        us = np.linspace(-1.5, 1.5, 41)
        closed = np.arctan(np.tan(us) + 1.0)
        resid = float(np.max(np.abs(rho.values(us) - closed)))

        jet0 = rho.jet_at(0.0)
        ratio0 = jet0.d2 / jet0.d1

        from .quadrature import adaptive_quad
        integral, _ = adaptive_quad(
            lambda us_: (rho.jets(us_)[:, 2] / rho.jets(us_)[:, 1]) ** 2,
            0.0, np.pi / 2, abs_tol=1e-12)

        eta = rho.inverse()
        _s1, s2 = entropy.entropy_exchanged_derivative_formula(rho, 0.0, c)
        return resid, ratio0, integral, s2 / 4.0, eta

    resid, ratio0, integral, s2_quarter, _eta = _numerical_guard(run)
    target_s2 = -c / 60.0
    click.echo(f"closed-form flow residual      : {resid:.3e}")
    click.echo(f"rho''(0)/rho'(0)               : {ratio0:.12f}   (target -1)")
    click.echo(f"integral over [0, pi/2]        : {integral:.12f}   (target ~1.4)")
    click.echo(f"S''(pi/4)/4 at c={central_charge:g}           : {s2_quarter:.12f}"
               f"   (target ~{target_s2:.6f})")
    click.echo(f"deviation from -c/60           : "
               f"{abs(s2_quarter - target_s2) / abs(target_s2) * 100:.2f}%")


@main.command("bekenstein")
@click.option("--field", "field_path", required=True, type=click.Path(exists=True))
@click.option("--radii", default="0.5,1,2,4", show_default=True,
              help="comma-separated interval radii")
@common_options
def cmd_bekenstein(field_path, radii, central_charge, quad_tol, seed, out, fmt):
    """Check S(r) <= pi r E in both state orderings on (-r, r)."""
    field = _load_field(field_path)
    cfg = RunConfig(central_charge=central_charge, quad_tol=quad_tol, seed=seed)
    rho = exponentiate(field, 1.0, cfg.flow_config)
    try:
        r_values = [float(r) for r in radii.split(",") if r.strip()]
    except ValueError:
        click.echo("error: bad radii list", err=True)
        sys.exit(EXIT_INVALID_SPEC)

    jobs = [(r, d) for r in r_values
            for d in (entropy.VACUUM_VS_STATE, entropy.STATE_VS_VACUUM)]

    def one(job):
        r, direction = job
        rec = entropy.bekenstein_check(rho, r, central_charge, direction, quad_tol)
        return [r, direction, rec.entropy, rec.energy,
                math.pi * r * rec.energy, rec.margin, rec.passed]

    rows = _numerical_guard(lambda: _map_rows(one, jobs))
    _write_rows(["r", "direction", "entropy", "energy", "pi_r_energy",
                 "margin", "passed"], rows, out, fmt)


@main.command("cocycle-check")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_cocycle_check(seed, out):
    """Bott cocycle residual on a seeded random triple of circle flows."""
    rng = np.random.default_rng(seed)

    def run():
        g1 = verify.random_circle_flow(rng)
        g2 = verify.random_circle_flow(rng)
        g3 = verify.random_circle_flow(rng)
        from .diffeo import compose
        b12 = cocycles.bott_cocycle(g1, g2).value
        b12_3 = cocycles.bott_cocycle(compose(g1, g2), g3).value
        b23 = cocycles.bott_cocycle(g2, g3).value
        b1_23 = cocycles.bott_cocycle(g1, compose(g2, g3)).value
        return {
            "B12": b12,
            "B12_3": b12_3,
            "B1_23": b1_23,
            "B23": b23,
            "coboundary_residual": b12 + b12_3 - b23 - b1_23,
        }

    record = _numerical_guard(run)
    text = json.dumps(record, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("extensivity")
@click.option("--field", "field_paths", required=True, multiple=True,
              type=click.Path(exists=True),
              help="two field specs (repeat the flag)")
@click.option("--t0", type=float, default=-2.0, show_default=True)
@click.option("--t1", type=float, default=1.5, show_default=True)
@click.option("--steps", type=int, default=15, show_default=True)
@common_options
def cmd_extensivity(field_paths, t0, t1, steps, central_charge, quad_tol,
                    seed, out, fmt):
    """Scan the additivity deviation s_t(f1, f2) against its bound."""
    if len(field_paths) != 2:
        click.echo("error: extensivity needs exactly two --field specs", err=True)
        sys.exit(EXIT_INVALID_SPEC)
    f1 = _load_field(field_paths[0])
    f2 = _load_field(field_paths[1])
    grid = [float(t) for t in np.linspace(t0, t1, steps)]

    def one(t: float):
        rep = asymptotics.extensivity_report(f1, f2, t, central_charge, quad_tol)
        return [rep.t, rep.s_exact, rep.eps0, rep.eps1, rep.eps2, rep.eps3,
                rep.bound, rep.satisfied]

    rows = _numerical_guard(lambda: _map_rows(one, grid))
    _write_rows(["t", "s_exact", "eps0", "eps1", "eps2", "eps3", "bound",
                 "satisfied"], rows, out, fmt)


@main.command("verify")
@click.argument("suite", type=click.Choice(["flows", "schwarzian", "entropy",
                                            "cocycles", "asymptotics", "all"]))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tolerance-scale", type=float, default=1.0, show_default=True,
              help="multiply all tolerances (testing aid)")
def cmd_verify(suite, seed, tolerance_scale):
    """Run a named invariant suite with a seeded generator."""
    results = _numerical_guard(
        lambda: verify.run_suite(suite, seed, tolerance_scale))
    any_failed = False
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        if not res.passed:
            any_failed = True
        click.echo(f"[{status}] {res.suite:<12} {res.name:<55} "
                   f"max residual {res.residual:.3e} (tol {res.tolerance:.1e})")
    click.echo(f"{len(results)} properties checked")
    if any_failed:
        sys.exit(EXIT_PROPERTY_VIOLATION)


if __name__ == "__main__":
    main()

"""Command-line front end.

Every command reads a config file (see :mod:`softhop.config`), writes one
table as CSV or JSON lines, and echoes the config in the output header so a
run can be reproduced from its output alone.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, massless
from .config import ConfigError, RunConfig, load_config
from .massless import NoGaitError
from .model import HopperState, nondimensionalize
from .sim import SimulationError, simulate_trajectory, touchdown_state

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SCHEMA_VERSION = 1


class NumericalFailure(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# output


def fmt(value) -> str:
    """Shortest round-trip text for numbers; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, np.integer):
        return int(value)
    return value


class Table:
    def __init__(self, schema: str, columns: list[str]):
        self.schema = schema
        self.columns = columns
        self.rows: list[list] = []

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f"{self.schema}: expected {len(self.columns)} values")
        self.rows.append(list(values))

    def render(self, cfg: RunConfig) -> str:
        echo = cfg.echo()
        if cfg.format == "jsonl":
            head = {"schema": self.schema, "version": SCHEMA_VERSION, "softhop": __version__,
                    "command": cfg.command, "config": echo, "columns": self.columns}
            lines = [json.dumps(head, sort_keys=True)]
            for row in self.rows:
                lines.append(json.dumps({c: _json_value(v) for c, v in zip(self.columns, row)}))
            return "\n".join(lines) + "\n"
        lines = [f"# schema: {self.schema} v{SCHEMA_VERSION}", f"# command: {cfg.command}"]
        lines += [f"# {k} = {v}" for k, v in echo.items()]
        lines.append(",".join(self.columns))
        lines += [",".join(fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _sibling(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix}"))


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: RunConfig) -> int:
    params = cfg.model_params()
    if not params.mu > 0:
        raise ConfigError("simulate needs model.mu > 0")
    sim = cfg.sim_config()
    if sim.sample_dt is None:
        sim = dataclasses.replace(sim, sample_dt=0.05)
    eps_td = cfg.get("eps_td", float)
    if eps_td is not None:
        state = touchdown_state(eps_td, params)
    else:
        xi_b = cfg.get("xi_b", float)
        state = HopperState(params.lambda_c if xi_b is None else xi_b, cfg.get("xi_f", float),
                            cfg.get("v_b", float), cfg.get("v_f", float))
    traj = simulate_trajectory(state, params, sim, cfg.get("n_hops", int))

    samples = Table("trajectory", ["tau", "xi_b", "xi_f", "v_b", "v_f", "domain"])
    for t, s, d in zip(traj.times, traj.states, traj.domains):
        samples.add(t, s.xi_b, s.xi_f, s.v_b, s.v_f, d.value)
    hops = Table("hops", ["hop", "eps_td_in", "eps_td_out", "eps_inj", "eps_ground_loss", "eps_lo_loss",
                          "eps_friction_loss", "depth_ce", "max_depth", "apex_clearance", "failed",
                          "reason", "events"])
    for i, h in enumerate(traj.hops):
        events = " ".join(f"{e.kind.value}@{fmt(e.time)}" for e in h.events)
        hops.add(i, h.eps_td_in, h.eps_td_out, h.eps_inj, h.eps_ground_loss, h.eps_lo_loss,
                 h.eps_friction_loss, h.depth_ce, h.max_depth, h.apex_clearance, h.failed, h.reason, events)
    if cfg.out is None:
        _write(hops.render(cfg), None)
    else:
        _write(samples.render(cfg), cfg.out)
        _write(hops.render(cfg), _sibling(cfg.out, "hops"))
    return EXIT_OK


def cmd_map(cfg: RunConfig) -> int:
    params = cfg.model_params()
    try:
        f = analysis.make_map(params, cfg.get("engine"), cfg.sim_config())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    points = cfg.get("points", int)
    if points < 1:
        raise ConfigError("map.points must be at least 1")
    grid = np.linspace(cfg.get("eps_min", float), cfg.get("eps_max", float), points)
    if grid[0] < 0:
        raise ConfigError("map.eps_min must be non-negative")
    values = analysis.ordered_map(f, [float(x) for x in grid], cfg.workers)
    table = Table("map", ["eps_td", "map_value", "failed"])
    for x, v in zip(grid, values):
        table.add(float(x), v, f.failed(v))
    _write(table.render(cfg), cfg.out)
    return EXIT_OK


def cmd_fixed_point(cfg: RunConfig) -> int:
    params = cfg.model_params()
    engine = cfg.get("engine")
    try:
        f = analysis.make_map(params, engine, cfg.sim_config())
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    table = Table("fixed-point", ["fixed_point", "eigenvalue", "efficiency", "stability_margin",
                                  "globally_stable"])
    if isinstance(f, analysis.ClosedFormMap):
        try:
            g = massless.gait_metrics(params)
        except NoGaitError as exc:
            raise NumericalFailure(str(exc)) from None
        table.add(g.fixed_point, g.eigenvalue, g.efficiency, g.stability_margin, g.globally_stable)
    else:
        roots = analysis.find_fixed_points(f)
        if not roots:
            raise NumericalFailure("no fixed point found")
        for r in roots:
            lam = analysis.numeric_eigenvalue(f, r)
            alpha = 1.0 - lam * lam if -1.0 <= lam <= 1.0 else 0.0
            table.add(r, lam, r / (params.eps_inj + r), alpha, None)
    _write(table.render(cfg), cfg.out)
    return EXIT_OK


def cmd_bifurcate(cfg: RunConfig) -> int:
    params = cfg.model_params()
    name = cfg.get("parameter")
    start, stop = cfg.get("start", float), cfg.get("stop", float)
    if start is None or stop is None:
        raise ConfigError("bifurcate.start and bifurcate.stop are required")
    points = cfg.get("points", int)
    if points < 1:
        raise ConfigError("bifurcate.points must be at least 1")
    seeds = cfg.get("seeds", list)
    try:
        records = analysis.bifurcation_scan(
            params, name, np.linspace(start, stop, points), engine=cfg.get("engine"),
            config=cfg.sim_config(), seeds=seeds, transient=cfg.get("transient", int),
            samples=cfg.get("samples", int), tol=cfg.get("tol", float),
            fixed_points=cfg.get("fixed_points", bool), workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    table = Table("bifurcation", ["value", "regime", "period", "stable", "seed", "eigenvalue", "eps_td"])
    for r in records:
        samples = r.attractor_samples or (None,)
        for x in samples:
            table.add(r.value, r.regime.value, r.period, r.stable, r.seed, r.eigenvalue, x)
    _write(table.render(cfg), cfg.out)
    if all(r.regime is analysis.Regime.ERROR for r in records):
        raise NumericalFailure("every grid cell failed")
    return EXIT_OK


def cmd_basin(cfg: RunConfig) -> int:
    params = cfg.model_params()
    engine = cfg.get("engine")
    closed = engine == "closed_form" or (engine == "auto" and params.mu == 0)
    if closed and params.mu != 0:
        raise ConfigError("the closed-form basin needs model.mu = 0")
    try:
        report = analysis.classify_basin(params, closed, cfg.get("depth", int), cfg.get("resolution", float),
                                         cfg.sim_config())
    except NoGaitError as exc:
        raise NumericalFailure(str(exc)) from None
    cls, lam = report.classification.value, report.eigenvalue
    table = Table("basin", ["kind", "lo", "hi", "depth", "classification", "eigenvalue"])
    table.add("fixed_point", report.fixed_point, report.fixed_point, 0, cls, lam)
    if report.map_minimum is not None:
        table.add("map_minimum", report.map_minimum[0], report.map_minimum[1], 0, cls, lam)
    if report.failure_interval is not None:
        table.add("failure", report.failure_interval[0], report.failure_interval[1], 0, cls, lam)
    for b in report.bands:
        table.add("band", b.lo, b.hi, b.depth, cls, lam)
    n = cfg.get("verify_samples", int)
    if n > 0:
        f = analysis.ClosedFormMap(params) if closed else analysis.SimulatedMap(params, cfg.sim_config())
        rng = np.random.default_rng(cfg.seed)
        for x0 in rng.uniform(0.0, cfg.get("verify_max", float), n):
            x, k = float(x0), 0
            for k in range(1, cfg.get("verify_iterations", int) + 1):
                x = f(x)
                if f.failed(x) or abs(x - report.fixed_point) <= 1e-6 * max(1.0, report.fixed_point):
                    break
            table.add("sample", float(x0), x, k, cls, lam)
    _write(table.render(cfg), cfg.out)
    return EXIT_OK


def cmd_surface(cfg: RunConfig) -> int:
    eps_star = cfg.get("eps_star", float)
    if not eps_star > 0:
        raise ConfigError("surface.eps_star must be positive")
    phis = np.linspace(cfg.get("phi_min", float), cfg.get("phi_max", float), cfg.get("phi_points", int))
    lo, hi, n = cfg.get("kappa_min", float), cfg.get("kappa_max", float), cfg.get("kappa_points", int)
    spacing = cfg.get("kappa_spacing")
    if spacing == "log":
        if not (lo > 0 and hi > 0):
            raise ConfigError("log kappa spacing needs positive bounds")
        kappas = np.geomspace(lo, hi, n)
    elif spacing == "linear":
        kappas = np.linspace(lo, hi, n)
    else:
        raise ConfigError("surface.kappa_spacing must be log or linear")
    if np.any(phis <= 0) or np.any(kappas <= 0):
        raise ConfigError("phi and kappa_c grids must be positive")
    cells = analysis.constant_fixed_point_surface(eps_star, phis, kappas, cfg.workers)
    table = Table("surface", ["phi", "kappa_c", "eps_inj", "eigenvalue", "efficiency", "stability_margin",
                              "stable", "exists"])
    for c in cells:
        table.add(c.phi, c.kappa_c, c.eps_inj, c.eigenvalue, c.efficiency, c.stability_margin, c.stable,
                  c.exists)
    _write(table.render(cfg), cfg.out)
    if not any(c.eps_inj is not None for c in cells):
        raise NumericalFailure("no cell has a solution")
    return EXIT_OK


def cmd_nondim(cfg: RunConfig) -> int:
    r = nondimensionalize(cfg.dimensional_spec())
    s = r.scales
    table = Table("nondim", ["kappa_c", "mu", "lambda_c", "mass_unit", "length_unit", "time_unit",
                             "energy_unit", "force_unit"])
    table.add(r.kappa_c, r.mu, r.lambda_c, s.mass, s.length, s.time, s.energy, s.force)
    _write(table.render(cfg), cfg.out)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "map": cmd_map,
    "fixed-point": cmd_fixed_point,
    "bifurcate": cmd_bifurcate,
    "basin": cmd_basin,
    "surface": cmd_surface,
    "nondim": cmd_nondim,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softhop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="sectioned key-value config file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
        p.add_argument("--workers", type=int, default=1, help="process pool size for sweeps")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="override a config value (repeatable)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args.config, args.overrides)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        cfg.out, cfg.format, cfg.workers, cfg.seed = args.out, args.format, args.workers, args.seed
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"softhop: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, SimulationError, NoGaitError, ArithmeticError) as exc:
        print(f"softhop: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Every subcommand reads a YAML config whose relative paths are resolved
against the config file's directory, writes CSV tables plus
``summary.json`` into ``--out``, and exits 0 on success, 2 on invalid
input and 3 when a solver fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .core import slice_cycles
from .degradation import cycle_life, fit_cycle_life
from .design import annual_assessment, payback
from .errors import SolverError, ValidationError
from .experiments import compare_runtime
from .io import (battery_from_dict, curve_for, load_hvac, load_tariff, read_load_csv, read_yaml,
                 write_json, write_table)
from .tariff import BOUNDS, bill, relaxed_bill, verify_peak_window

log = logging.getLogger("dsmopt")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3


class Config:
    """YAML mapping with paths resolved relative to its own location."""

    def __init__(self, path):
        self.path = Path(path)
        self.data = read_yaml(self.path)

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require(self, key):
        if key not in self.data:
            raise ValidationError(f"{self.path}: missing required key {key!r}")
        return self.data[key]

    def file(self, key) -> Path:
        p = Path(self.require(key))
        return p if p.is_absolute() else self.path.parent / p

    def mapping_or_file(self, key):
        value = self.require(key)
        if isinstance(value, dict):
            return value
        return read_yaml(self.file(key))


def _bounds(args, cfg) -> tuple[str, ...]:
    choice = args.bound or cfg.get("bound", "both")
    if choice == "both":
        return BOUNDS
    if choice not in BOUNDS:
        raise ValidationError(f"bound must be hi, lo or both, got {choice!r}")
    return (choice,)


def _seed(args, cfg) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    if not isinstance(seed, int):
        raise ValidationError(f"seed must be an integer, got {seed!r}")
    return seed


def _battery(cfg):
    bcfg = cfg.mapping_or_file("battery")
    battery = battery_from_dict(bcfg)
    return battery, curve_for(battery, int(bcfg.get("segments", 10)))


def cmd_fit_degradation(args, cfg, out: Path) -> dict:
    bcfg = cfg.mapping_or_file("battery")
    battery = battery_from_dict(bcfg)
    segments = int(bcfg.get("segments", 10))
    fit = fit_cycle_life(battery.cycle_life_points)
    curve = curve_for(battery, segments)
    write_table([{"dod": float(x), "cost": float(y)} for x, y in zip(curve.dod_x, curve.cost_y)],
                out / "curve.csv")
    pts = np.asarray(battery.cycle_life_points, dtype=float)
    write_table([{"dod": float(d), "cycles": float(n), "fitted_cycles": float(cycle_life(fit, d))}
                 for d, n in pts], out / "fit.csv")
    return {
        "a": fit.a, "b": fit.b, "segments": segments,
        "capital_cost_battery": battery.capital_cost_battery,
        "slopes": curve.slopes.tolist(),
    }


def cmd_bill(args, cfg, out: Path) -> dict:
    tariff = load_tariff(cfg.file("tariff"))
    profile = read_load_csv(cfg.file("load_csv"))
    bounds = _bounds(args, cfg)
    rows = []
    for cycle in slice_cycles(profile):
        b = bill(tariff, cycle)
        row = {"year": cycle.year, "month": cycle.month,
               "energy_charge": b.energy_charge, "demand_charge": b.demand_charge,
               "total": b.total, "peak_kw": b.peak_kw, "peak_hour": b.peak_hour,
               "in_peak_window": verify_peak_window(tariff, cycle)}
        for bound in bounds:
            row[f"relaxed_{bound}"] = relaxed_bill(tariff, cycle, bound)
        rows.append(row)
    write_table(rows, out / "bills.csv")
    return {"cycles": len(rows), "total": float(sum(r["total"] for r in rows)),
            "relaxed": {bd: float(sum(r[f"relaxed_{bd}"] for r in rows)) for bd in bounds}}


def cmd_assess(args, cfg, out: Path) -> dict:
    tariff = load_tariff(cfg.file("tariff"))
    profile = read_load_csv(cfg.file("load_csv"))
    battery, curve = _battery(cfg)
    use_hvac = args.hvac or bool(cfg.get("hvac_enabled", False))
    hvac = load_hvac(cfg.mapping_or_file("hvac")) if use_hvac else None
    blind = bool(args.degradation_blind or cfg.get("degradation_blind", False))
    bounds = _bounds(args, cfg)
    report = annual_assessment(profile, battery, curve, tariff, hvac, bounds, blind,
                               cfg.get("backend", "auto"))
    rows = []
    for c in report.cycles:
        rows.append({"year": c.year, "month": c.month, "bound": c.bound,
                     "baseline_bill": c.baseline_bill, "optimized_bill": c.optimized_bill,
                     "saving": c.saving, "degradation": c.degradation,
                     "net_saving": c.net_saving, "baseline_exact": c.baseline_exact,
                     "optimized_exact": c.optimized_exact, "hvac_days": c.hvac_days,
                     "verified": c.verified})
    write_table(rows, out / "monthly.csv")
    dispatch = []
    for (year, month, bound), res in report.results.items():
        for d, power in enumerate(res.plan.battery_power):
            dispatch.append({"year": year, "month": month, "bound": bound, "day": d + 1,
                             "throughput_kwh": float(np.abs(power).sum() * res.cycle.dt_hours),
                             "peak_kw": float(res.plan.net_load(res.cycle.days)[d].max()),
                             "degradation": float(res.plan.per_day_degradation[d])})
    write_table(dispatch, out / "daily.csv")
    pb = payback(report, battery)
    return {
        "degradation_blind": blind, "hvac": hvac is not None,
        "bounds": {b: {"annual_saving": report.annual_saving(b),
                       "annual_degradation": report.annual_degradation(b),
                       "payback_years": pb[b].years,
                       "salvage_fraction": pb[b].salvage_fraction} for b in report.bounds},
        "unverified_cycles": [f"{c.year}-{c.month:02d}/{c.bound}" for c in report.unverified()],
    }


def cmd_runtime(args, cfg, out: Path) -> dict:
    tariff = load_tariff(cfg.file("tariff"))
    train = read_load_csv(cfg.file("train_csv"))
    test = read_load_csv(cfg.file("test_csv"))
    battery, curve = _battery(cfg)
    n = int(cfg.get("scenarios", 20))
    if n < 1:
        raise ValidationError("scenarios must be at least 1")
    noise = float(cfg.get("forecast_noise", 0.0))
    seed = _seed(args, cfg)
    report = compare_runtime(train, test, battery, curve, tariff, _bounds(args, cfg), n, seed,
                             noise, cfg.get("backend", "auto"))
    write_table([c.as_row() for c in report.cycles], out / "monthly.csv")
    write_table(report.monthly_series(), out / "costs.csv")
    return {
        "scenarios": n, "forecast_noise": noise,
        "bounds": {b: {"design_saving": report.design_saving(b),
                       "runtime_saving": report.runtime_saving(b),
                       "ratio": report.ratio(b)} for b in report.bounds},
    }


COMMANDS = {
    "fit-degradation": (cmd_fit_degradation, "fit cycle life and emit the cost curve"),
    "bill": (cmd_bill, "exact and relaxed monthly bills of a load CSV"),
    "assess": (cmd_assess, "perfect-foresight dispatch, savings and payback"),
    "runtime": (cmd_runtime, "stochastic daily control versus the design optimum"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsmopt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="YAML configuration file")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--bound", choices=["hi", "lo", "both"], default=None)
        p.add_argument("--out", default="out", help="output directory")
        if name == "assess":
            p.add_argument("--degradation-blind", action="store_true",
                           help="dispatch without wear cost, then charge it")
            p.add_argument("--hvac", action="store_true", help="enable pre/post-cooling")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    func = COMMANDS[args.command][0]
    out = Path(args.out)
    try:
        cfg = Config(args.config)
        out.mkdir(parents=True, exist_ok=True)
        summary = func(args, cfg, out)
        summary = {"command": args.command, "seed": _seed(args, cfg), **summary}
        write_json(summary, out / "summary.json")
    except (ValidationError, FileNotFoundError, IsADirectoryError, yaml.YAMLError) as exc:
        print(f"dsmopt: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"dsmopt: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if summary.get("unverified_cycles"):
        log.warning("peak outside the peak window in: %s", ", ".join(summary["unverified_cycles"]))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

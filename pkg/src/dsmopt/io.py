"""Load CSV ingestion, YAML configuration and table emission."""

from __future__ import annotations

import csv
import json
from datetime import datetime, timedelta
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .core import BatterySpec, HvacParams, LoadProfile
from .degradation import build_curve, fit_cycle_life
from .errors import ValidationError
from .tariff import TariffModel


def sample_path(name: str) -> Path:
    """Path of a file shipped in ``dsmopt/data``."""
    return Path(str(resources.files("dsmopt") / "data" / name))


def read_load_csv(path) -> LoadProfile:
    """Parse a ``timestamp,kw`` CSV into a :class:`LoadProfile`.

    Timestamps are naive ISO-8601 local times at one uniform spacing. Gaps,
    duplicates, reversed order and negative readings are rejected with the
    offending line number.
    """
    path = Path(path)
    stamps, values = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["timestamp", "kw"]:
            raise ValidationError(f"{path}: header must be 'timestamp,kw', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValidationError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                ts = datetime.fromisoformat(row[0].strip())
                kw = float(row[1])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
            if not np.isfinite(kw) or kw < 0:
                raise ValidationError(f"{path}:{lineno}: invalid power {row[1]!r}")
            if len(stamps) >= 2:
                step = stamps[1] - stamps[0]
                expected = stamps[-1] + step
                if ts != expected:
                    if ts <= stamps[-1]:
                        raise ValidationError(
                            f"{path}:{lineno}: timestamp {ts.isoformat()} is not after "
                            f"{stamps[-1].isoformat()}")
                    raise ValidationError(
                        f"{path}:{lineno}: gap, expected {expected.isoformat()} "
                        f"but got {ts.isoformat()}")
            elif len(stamps) == 1 and ts <= stamps[0]:
                raise ValidationError(f"{path}:{lineno}: timestamp {ts.isoformat()} is not increasing")
            stamps.append(ts)
            values.append(kw)
    if len(stamps) < 2:
        raise ValidationError(f"{path}: need at least two rows")
    step = stamps[1] - stamps[0]
    minutes = step.total_seconds() / 60.0
    if minutes != int(minutes):
        raise ValidationError(f"{path}: interval of {minutes} minutes is not whole")
    return LoadProfile(stamps[0], np.array(values), int(minutes))


def write_load_csv(profile: LoadProfile, path) -> None:
    step = timedelta(minutes=profile.interval_minutes)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "kw"])
        ts = profile.start
        for v in profile.values:
            w.writerow([ts.isoformat(), repr(float(v))])
            ts += step


def read_yaml(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a mapping at top level")
    return data


def load_tariff(path) -> TariffModel:
    return TariffModel.from_dict(read_yaml(path))


def battery_from_dict(cfg: dict) -> BatterySpec:
    keys = {"soe_max", "soe_ini", "p_min", "p_max", "capital_cost_battery",
            "capital_cost_inverter", "cycle_life_points", "round_trip_efficiency"}
    unknown = set(cfg) - keys - {"segments"}
    if unknown:
        raise ValidationError(f"unknown battery keys: {sorted(unknown)}")
    try:
        return BatterySpec(**{k: cfg[k] for k in keys if k in cfg})
    except TypeError as exc:
        raise ValidationError(f"battery config: {exc}") from None


def load_battery(path, overrides: dict | None = None):
    """Battery spec and its fitted degradation curve."""
    cfg = read_yaml(path)
    cfg.update(overrides or {})
    battery = battery_from_dict(cfg)
    return battery, curve_for(battery, int(cfg.get("segments", 10)))


def curve_for(battery: BatterySpec, segments: int = 10):
    if not battery.cycle_life_points:
        raise ValidationError("battery has no cycle_life_points to fit")
    fit = fit_cycle_life(battery.cycle_life_points)
    return build_curve(fit, battery.capital_cost_battery, segments)


def load_hvac(path_or_dict) -> HvacParams:
    cfg = path_or_dict if isinstance(path_or_dict, dict) else read_yaml(path_or_dict)
    try:
        return HvacParams(**cfg)
    except TypeError as exc:
        raise ValidationError(f"hvac config: {exc}") from None


def write_table(rows: list[dict], path) -> None:
    """Comma-separated table; floats written with round-trip precision."""
    if not rows:
        Path(path).write_text("", encoding="utf-8")
        return
    fields = list(rows[0])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def _parse_cell(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    if text in ("True", "False"):
        return text == "True"
    return text


def read_table(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return [{k: _parse_cell(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_json(data, path) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=False) + "\n", encoding="utf-8")

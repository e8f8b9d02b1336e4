"""Time-of-use energy charge plus time-of-peak demand charge.

The demand charge of a billing cycle is the cycle's single largest
interval demand times a $/kW rate that depends on the season and on the
hour at which that peak occurred. Ties go to the earliest interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BillingCycle
from .errors import ValidationError

BOUNDS = ("hi", "lo")


def _hourly(values, what):
    """Expand a 24-list or a ``{"h0-h1": price}`` mapping (inclusive hours)."""
    if isinstance(values, dict):
        out = np.full(24, np.nan)
        for key, price in values.items():
            key = str(key)
            if "-" in key:
                h0, h1 = (int(v) for v in key.split("-"))
            else:
                h0 = h1 = int(key)
            if not 0 <= h0 <= h1 <= 23:
                raise ValidationError(f"{what}: bad hour range {key!r}")
            out[h0:h1 + 1] = float(price)
    else:
        out = np.asarray(values, dtype=float)
    if out.shape != (24,):
        raise ValidationError(f"{what}: need 24 hourly prices, got shape {out.shape}")
    if np.any(np.isnan(out)):
        missing = np.flatnonzero(np.isnan(out)).tolist()
        raise ValidationError(f"{what}: no price for hours {missing}")
    if np.any(out < 0):
        raise ValidationError(f"{what}: prices must be non-negative")
    return out


@dataclass(frozen=True)
class TariffModel:
    """Seasonal hourly energy ($/kWh) and demand ($/kW) prices.

    ``seasons`` maps a season name to its calendar months; every month must
    belong to exactly one season. ``peak_window`` is an inclusive hour range.
    """

    seasons: dict
    energy_price: dict
    demand_price: dict
    peak_window: tuple = (7, 20)

    def __post_init__(self):
        seasons = {str(k): tuple(int(m) for m in v) for k, v in self.seasons.items()}
        months = sorted(m for ms in seasons.values() for m in ms)
        if months != list(range(1, 13)):
            raise ValidationError(f"seasons must partition months 1-12, got {months}")
        energy, demand = {}, {}
        for s in seasons:
            if s not in self.energy_price or s not in self.demand_price:
                raise ValidationError(f"season {s!r} lacks an energy or demand price schedule")
            energy[s] = _hourly(self.energy_price[s], f"energy_price[{s}]")
            demand[s] = _hourly(self.demand_price[s], f"demand_price[{s}]")
            energy[s].setflags(write=False)
            demand[s].setflags(write=False)
        w0, w1 = (int(h) for h in self.peak_window)
        if not 0 <= w0 <= w1 <= 23:
            raise ValidationError(f"peak_window {self.peak_window} must lie within 0-23")
        object.__setattr__(self, "seasons", seasons)
        object.__setattr__(self, "energy_price", energy)
        object.__setattr__(self, "demand_price", demand)
        object.__setattr__(self, "peak_window", (w0, w1))

    @classmethod
    def from_dict(cls, cfg: dict) -> "TariffModel":
        try:
            return cls(cfg["seasons"], cfg["energy_price"], cfg["demand_price"],
                       tuple(cfg.get("peak_window", (7, 20))))
        except KeyError as exc:
            raise ValidationError(f"tariff config missing key {exc}") from None

    def to_dict(self) -> dict:
        return {
            "seasons": {s: list(m) for s, m in self.seasons.items()},
            "energy_price": {s: p.tolist() for s, p in self.energy_price.items()},
            "demand_price": {s: p.tolist() for s, p in self.demand_price.items()},
            "peak_window": list(self.peak_window),
        }

    def season_of(self, month: int) -> str:
        for s, months in self.seasons.items():
            if month in months:
                return s
        raise ValidationError(f"month {month} has no season")

    def in_window(self, hour) -> np.ndarray | bool:
        w0, w1 = self.peak_window
        return (np.asarray(hour) >= w0) & (np.asarray(hour) <= w1)

    def slot_energy_price(self, month: int, interval_minutes: int = 15) -> np.ndarray:
        """$/kWh for every slot of a day in ``month``."""
        hours = (np.arange(1440 // interval_minutes) * interval_minutes) // 60
        return self.energy_price[self.season_of(month)][hours]

    def bound_price(self, month: int, bound: str) -> float:
        lo, hi = demand_price_bounds(self, self.season_of(month))
        if bound == "hi":
            return hi
        if bound == "lo":
            return lo
        raise ValidationError(f"bound must be 'hi' or 'lo', got {bound!r}")


@dataclass(frozen=True)
class BillBreakdown:
    energy_charge: float
    demand_charge: float
    peak_kw: float
    peak_interval_index: int
    peak_hour: int

    @property
    def total(self) -> float:
        return self.energy_charge + self.demand_charge


def energy_charge(tariff: TariffModel, cycle: BillingCycle) -> float:
    price = tariff.slot_energy_price(cycle.month, cycle.interval_minutes)
    return float(np.sum(cycle.days @ price) * cycle.dt_hours)


def find_peak(cycle: BillingCycle) -> tuple[float, int, int]:
    """Peak kW, its interval index in the cycle, and its hour of day."""
    values = cycle.values
    if values.size == 0:
        raise ValidationError("empty billing cycle")
    idx = int(np.argmax(values))  # first occurrence on ties
    slot = idx % cycle.slots_per_day
    return float(values[idx]), idx, int(slot * cycle.interval_minutes // 60)


def demand_charge_exact(tariff: TariffModel, cycle: BillingCycle) -> tuple[float, float, int, int]:
    """Demand charge priced at the hour of the (earliest) cycle peak.

    Returns ``(charge, peak_kw, peak_interval_index, peak_hour)``.
    """
    peak, idx, hour = find_peak(cycle)
    rate = tariff.demand_price[tariff.season_of(cycle.month)][hour]
    return float(rate * peak), peak, idx, hour


def demand_price_bounds(tariff: TariffModel, season: str) -> tuple[float, float]:
    """Lowest and highest demand rate inside the peak window."""
    if season not in tariff.demand_price:
        raise ValidationError(f"unknown season {season!r}")
    w0, w1 = tariff.peak_window
    window = tariff.demand_price[season][w0:w1 + 1]
    return float(window.min()), float(window.max())


def verify_peak_window(tariff: TariffModel, cycle: BillingCycle) -> bool:
    _, _, hour = find_peak(cycle)
    return bool(tariff.in_window(hour))


def bill(tariff: TariffModel, cycle: BillingCycle) -> BillBreakdown:
    charge, peak, idx, hour = demand_charge_exact(tariff, cycle)
    return BillBreakdown(energy_charge(tariff, cycle), charge, peak, idx, hour)


def relaxed_bill(tariff: TariffModel, cycle: BillingCycle, bound: str) -> float:
    """Energy charge plus the peak priced at the hi/lo window rate."""
    peak, _, _ = find_peak(cycle)
    return energy_charge(tariff, cycle) + tariff.bound_price(cycle.month, bound) * peak

"""Domain types shared across the package and calendar slicing of loads.

Power is in kW, energy in kWh, money in dollars. Battery power is positive
when charging, so it adds to the building's net load.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from .errors import ValidationError

MINUTES_PER_DAY = 24 * 60


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def slots_per_day(interval_minutes: int) -> int:
    if interval_minutes <= 0 or MINUTES_PER_DAY % interval_minutes:
        raise ValidationError(f"interval_minutes={interval_minutes} must divide 1440")
    return MINUTES_PER_DAY // interval_minutes


@dataclass(frozen=True)
class LoadProfile:
    """Whole days of interval-average building demand."""

    start: datetime
    values: np.ndarray
    interval_minutes: int = 15

    def __post_init__(self):
        H = slots_per_day(self.interval_minutes)
        values = _frozen_array(self.values).ravel()
        values.setflags(write=False)
        if values.size == 0 or values.size % H:
            raise ValidationError(
                f"profile has {values.size} intervals, not a whole number of {H}-slot days")
        if not np.all(np.isfinite(values)):
            raise ValidationError("profile contains non-finite values")
        if np.any(values < 0):
            k = int(np.flatnonzero(values < 0)[0])
            raise ValidationError(f"negative load {values[k]} kW at interval {k}")
        object.__setattr__(self, "values", values)

    @property
    def slots_per_day(self) -> int:
        return MINUTES_PER_DAY // self.interval_minutes

    @property
    def n_days(self) -> int:
        return self.values.size // self.slots_per_day

    @property
    def timestamps(self) -> list[datetime]:
        step = timedelta(minutes=self.interval_minutes)
        return [self.start + k * step for k in range(self.values.size)]

    def days(self) -> np.ndarray:
        return self.values.reshape(self.n_days, self.slots_per_day)


@dataclass(frozen=True)
class BillingCycle:
    """One calendar month of per-day load slices, shape ``(days, H)``."""

    year: int
    month: int
    days: np.ndarray
    interval_minutes: int = 15

    def __post_init__(self):
        days = _frozen_array(self.days)
        if days.ndim != 2:
            raise ValidationError("billing cycle days must be a 2-D array (day, slot)")
        if not 1 <= self.month <= 12:
            raise ValidationError(f"month {self.month} out of range")
        H = slots_per_day(self.interval_minutes)
        if days.shape[1] != H:
            raise ValidationError(f"day slices have {days.shape[1]} slots, expected {H}")
        object.__setattr__(self, "days", days)

    @property
    def n_days(self) -> int:
        return self.days.shape[0]

    @property
    def slots_per_day(self) -> int:
        return self.days.shape[1]

    @property
    def dt_hours(self) -> float:
        return self.interval_minutes / 60.0

    @property
    def values(self) -> np.ndarray:
        return self.days.ravel()

    @property
    def start(self) -> datetime:
        return datetime(self.year, self.month, 1)

    def hour_of_slot(self) -> np.ndarray:
        """Hour of day for every slot of one day."""
        return (np.arange(self.slots_per_day) * self.interval_minutes) // 60

    def with_days(self, days) -> "BillingCycle":
        """Same calendar position, different per-interval power."""
        days = np.asarray(days, dtype=float).reshape(self.days.shape)
        return BillingCycle(self.year, self.month, days, self.interval_minutes)


def slice_cycles(profile: LoadProfile) -> list[BillingCycle]:
    """Split a profile into calendar-month billing cycles.

    The profile must start at midnight on the first day of a month and end
    exactly on a month boundary; partial months are rejected.
    """
    s = profile.start
    if (s.day, s.hour, s.minute, s.second, s.microsecond) != (1, 0, 0, 0, 0):
        raise ValidationError(
            f"profile starts at {s.isoformat()}; billing cycles need midnight on a month's first day")
    days = profile.days()
    cycles = []
    year, month, pos = s.year, s.month, 0
    while pos < len(days):
        length = calendar.monthrange(year, month)[1]
        if pos + length > len(days):
            raise ValidationError(
                f"profile ends {len(days) - pos} days into {year}-{month:02d}, "
                f"which has {length} days; partial billing cycles are not supported")
        cycles.append(BillingCycle(year, month, days[pos:pos + length], profile.interval_minutes))
        pos += length
        month += 1
        if month == 13:
            year, month = year + 1, 1
    return cycles


def net_load(day_load, battery_power, hvac_delta=None) -> np.ndarray:
    """Grid-side demand: building load plus battery power plus HVAC delta."""
    load = np.asarray(day_load, dtype=float)
    bat = np.asarray(battery_power, dtype=float)
    hvac = np.zeros_like(load) if hvac_delta is None else np.asarray(hvac_delta, dtype=float)
    if load.shape != bat.shape or load.shape != hvac.shape:
        raise ValidationError(
            f"length mismatch: load {load.shape}, battery {bat.shape}, hvac {hvac.shape}")
    return load + bat + hvac


@dataclass(frozen=True)
class BatterySpec:
    """Battery pack plus inverter.

    ``cycle_life_points`` are (depth of discharge, cycles to end of life)
    test results; depth strictly increasing, cycles strictly decreasing.
    """

    soe_max: float
    p_min: float
    p_max: float
    capital_cost_battery: float
    capital_cost_inverter: float = 0.0
    cycle_life_points: tuple = ()
    soe_ini: float | None = None
    round_trip_efficiency: float = 1.0

    def __post_init__(self):
        soe_ini = self.soe_max if self.soe_ini is None else self.soe_ini
        object.__setattr__(self, "soe_ini", float(soe_ini))
        pts = tuple((float(d), float(c)) for d, c in self.cycle_life_points)
        object.__setattr__(self, "cycle_life_points", pts)
        if self.soe_max < 0:
            raise ValidationError("soe_max must be non-negative")
        if not 0 <= soe_ini <= self.soe_max:
            raise ValidationError(f"soe_ini={soe_ini} outside [0, soe_max={self.soe_max}]")
        if not self.p_min <= 0 <= self.p_max:
            raise ValidationError(f"need p_min <= 0 <= p_max, got {self.p_min}, {self.p_max}")
        if self.capital_cost_battery < 0 or self.capital_cost_inverter < 0:
            raise ValidationError("capital costs must be non-negative")
        if not 0 < self.round_trip_efficiency <= 1:
            raise ValidationError("round_trip_efficiency must be in (0, 1]")
        if pts:
            if len(pts) < 2:
                raise ValidationError("cycle_life_points needs at least two entries")
            dod = np.array([p[0] for p in pts])
            cyc = np.array([p[1] for p in pts])
            if np.any(dod < 0) or np.any(dod > 1) or np.any(cyc <= 0):
                raise ValidationError("cycle_life_points need DoD in [0, 1] and cycles > 0")
            if np.any(np.diff(dod) <= 0) or np.any(np.diff(cyc) >= 0):
                raise ValidationError(
                    "cycle_life_points must have increasing DoD and decreasing cycle counts")

    @property
    def capital_cost(self) -> float:
        return self.capital_cost_battery + self.capital_cost_inverter

    @property
    def dod_ini(self) -> float:
        if self.soe_max == 0:
            return 0.0
        return (self.soe_max - self.soe_ini) / self.soe_max


@dataclass(frozen=True)
class HvacParams:
    """Pre-cooling (+u % of load for x hours) followed by post-cooling
    (-v % for y hours).

    ``post_start_hours`` restricts where post-cooling may begin; by default
    it starts as soon as pre-cooling ends.
    """

    pre_hours: int
    pre_increase_pct: float
    post_hours: int
    post_decrease_pct: float
    candidate_start_hours: tuple = field(default=tuple(range(10, 14)))
    post_start_hours: tuple | None = None

    def __post_init__(self):
        if self.pre_hours < 1 or self.post_hours < 1:
            raise ValidationError("pre_hours and post_hours must be at least 1")
        for pct in (self.pre_increase_pct, self.post_decrease_pct):
            if not 0 <= pct <= 100:
                raise ValidationError(f"HVAC percentage {pct} outside [0, 100]")
        starts = tuple(sorted({int(h) for h in self.candidate_start_hours}))
        if not starts:
            raise ValidationError("candidate_start_hours must not be empty")
        object.__setattr__(self, "candidate_start_hours", starts)
        if self.post_start_hours is not None:
            object.__setattr__(self, "post_start_hours",
                               tuple(sorted({int(h) for h in self.post_start_hours})))

    def window_pairs(self) -> list[tuple[int, int]]:
        """Admissible (pre_start, post_start) hours: pre ends before post begins
        and both fit inside the day."""
        pairs = []
        for p in self.candidate_start_hours:
            if p < 0 or p + self.pre_hours > 24:
                continue
            posts = ((p + self.pre_hours,) if self.post_start_hours is None
                     else self.post_start_hours)
            for q in posts:
                if q >= p + self.pre_hours and q + self.post_hours <= 24:
                    pairs.append((p, q))
        return pairs

    def deltas(self, day_load, pre_start, post_start, interval_minutes=15):
        """Per-slot (pre, post) kW adjustments for one day."""
        load = np.asarray(day_load, dtype=float)
        hour = (np.arange(load.size) * interval_minutes) // 60
        pre = np.where((hour >= pre_start) & (hour < pre_start + self.pre_hours),
                       load * self.pre_increase_pct / 100.0, 0.0)
        post = np.where((hour >= post_start) & (hour < post_start + self.post_hours),
                        -load * self.post_decrease_pct / 100.0, 0.0)
        return pre, post

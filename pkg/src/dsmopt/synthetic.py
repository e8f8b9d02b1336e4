"""Synthetic office-building load years.

Not measured data. The generator produces an occupancy plateau on weekdays,
an afternoon cooling hump scaled by a random daily temperature, lower
weekend use and small interval noise, which is enough structure for peak
shaving to matter and for a few days per month to set the demand charge.
"""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np

from .core import LoadProfile


def _occupancy(hours, weekday):
    if weekday:
        ramp_up = np.clip((hours - 6.0) / 2.0, 0.0, 1.0)
        ramp_down = np.clip((20.0 - hours) / 2.0, 0.0, 1.0)
        return 0.35 + 0.45 * np.minimum(ramp_up, ramp_down)
    return 0.35 + 0.08 * np.clip((hours - 8.0) / 2.0, 0.0, 1.0) * np.clip((18.0 - hours) / 2.0, 0.0, 1.0)


def daily_temperature(year, n_days, rng):
    """Daily mean outdoor temperature (deg C): seasonal cycle plus AR(1) weather."""
    doy = np.arange(n_days)
    seasonal = 12.5 - 13.0 * np.cos(2 * np.pi * (doy - 15) / 365.0)
    noise = np.zeros(n_days)
    eps = rng.normal(0.0, 2.2, n_days)
    for d in range(1, n_days):
        noise[d] = 0.7 * noise[d - 1] + eps[d]
    return seasonal + noise


def office_year(year: int = 2015, seed: int = 0, peak_kw: float = 500.0,
                interval_minutes: int = 15, n_days: int | None = None) -> LoadProfile:
    """One calendar year (or ``n_days``) of 15-minute office load in kW."""
    rng = np.random.default_rng(seed)
    start = datetime(year, 1, 1)
    if n_days is None:
        n_days = (datetime(year + 1, 1, 1) - start).days
    H = 1440 // interval_minutes
    hours = (np.arange(H) + 0.5) * interval_minutes / 60.0
    temps = daily_temperature(year, n_days, rng)
    hump = np.exp(-(((hours - 15.0) / 2.5) ** 2))
    morning = np.exp(-(((hours - 9.0) / 1.5) ** 2))
    days = np.empty((n_days, H))
    for d in range(n_days):
        date = start + timedelta(days=d)
        weekday = date.weekday() < 5
        occ = _occupancy(hours, weekday)
        cooling = max(0.0, temps[d] - 16.0) * 0.022
        heating = max(0.0, 8.0 - temps[d]) * 0.008
        gain = 1.0 if weekday else 0.35
        shape = occ + gain * (cooling * hump * (0.6 + 0.4 * (occ > 0.5)) + heating * morning)
        days[d] = shape * peak_kw * (1.0 + rng.normal(0.0, 0.01, H))
    return LoadProfile(start, np.clip(days, 0.0, None).ravel(), interval_minutes)


def office_years(first_year: int = 2014, years: int = 2, seed: int = 0,
                 **kwargs) -> list[LoadProfile]:
    """Consecutive independent years from the same generator."""
    return [office_year(first_year + k, seed=seed + k, **kwargs) for k in range(years)]


SHIPPED_SEED = 10


def write_shipped(directory) -> list:
    """Regenerate the sample two-year dataset shipped with the package."""
    from pathlib import Path

    from .io import write_load_csv

    paths = []
    for profile in office_years(2014, 2, seed=SHIPPED_SEED):
        path = Path(directory) / f"office_{profile.start.year}.csv"
        write_load_csv(profile, path)
        paths.append(path)
    return paths


if __name__ == "__main__":
    import sys

    for p in write_shipped(sys.argv[1] if len(sys.argv) > 1 else "."):
        print(p)

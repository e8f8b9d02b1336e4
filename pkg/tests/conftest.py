import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsmopt.core import BatterySpec, BillingCycle  # noqa: E402
from dsmopt.io import load_battery, load_hvac, load_tariff, sample_path  # noqa: E402
from dsmopt.tariff import TariffModel  # noqa: E402


@pytest.fixture(scope="session")
def tariff():
    return load_tariff(sample_path("tariff_nyc_synthetic.yaml"))


@pytest.fixture(scope="session")
def battery_and_curve():
    return load_battery(sample_path("battery_10kwh.yaml"))


@pytest.fixture(scope="session")
def battery(battery_and_curve):
    return battery_and_curve[0]


@pytest.fixture(scope="session")
def curve(battery_and_curve):
    return battery_and_curve[1]


@pytest.fixture(scope="session")
def hvac():
    return load_hvac(sample_path("hvac_office.yaml"))


def flat_tariff(energy=0.1, demand=20.0, window=(7, 20)):
    """Single-season tariff with constant prices."""
    return TariffModel({"all": list(range(1, 13))}, {"all": [energy] * 24},
                       {"all": [demand] * 24}, window)


def peaky_cycle(rng, n_days=5, interval_minutes=60, month=7, base=50.0, spike=30.0):
    """Office-like days with one random afternoon bump each."""
    H = 1440 // interval_minutes
    hours = np.arange(H) * interval_minutes / 60.0
    days = []
    for _ in range(n_days):
        centre = rng.uniform(12, 17)
        bump = spike * rng.uniform(0.3, 1.0) * np.exp(-((hours - centre) / 2.0) ** 2)
        days.append(base * (0.6 + 0.4 * ((hours >= 8) & (hours < 19))) + bump
                    + rng.uniform(0, 2, H))
    return BillingCycle(2015, month, np.array(days), interval_minutes)


def small_battery(capital=500.0, soe=20.0, power=10.0):
    return BatterySpec(soe, -power, power, capital, 0.0,
                       ((0.2, 3000.0), (0.5, 1000.0), (1.0, 150.0)))


ACCEPTANCE = {}  # criterion number -> (passed, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")

"""Moving-horizon stochastic battery control within a billing cycle.

Each morning the controller knows the realized cycle peak so far and a
forecast of today's load, but not the rest of the month. The unknown
future peak day is represented by scenarios drawn from a kernel density
fitted to historical daily peaks; a two-stage program chooses today's
dispatch against the sample average of the scenario outcomes, and only
today's decision is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ._formulation import Builder, add_battery_day, add_peak_rows
from .core import BatterySpec, BillingCycle
from .degradation import DegradationCurve, daily_degradation
from .design import DispatchPlan
from .errors import SolverError, ValidationError
from .lp import solve_lp
from .tariff import BillBreakdown, TariffModel, bill, relaxed_bill

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class KdeModel:
    """Gaussian kernel density over historical daily peaks (kW)."""

    samples: np.ndarray
    bandwidth: float

    def __post_init__(self):
        s = np.array(self.samples, dtype=float).ravel()
        if s.size == 0:
            raise ValidationError("KDE needs at least one sample")
        if not self.bandwidth > 0:
            raise ValidationError("KDE bandwidth must be positive")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x[..., None] - self.samples) / self.bandwidth
        return np.exp(-0.5 * z * z).sum(axis=-1) / (self.samples.size * self.bandwidth * _SQRT_2PI)

    @property
    def mean(self) -> float:
        return float(self.samples.mean())

    @property
    def variance(self) -> float:
        return float(self.samples.var() + self.bandwidth ** 2)

    def sample(self, n: int, rng) -> np.ndarray:
        """Draw ``n`` non-negative values; negative draws are redrawn."""
        rng = np.random.default_rng(rng)
        out = self.samples[rng.integers(self.samples.size, size=n)] \
            + self.bandwidth * rng.standard_normal(n)
        bad = out < 0
        while np.any(bad):
            k = int(bad.sum())
            out[bad] = self.samples[rng.integers(self.samples.size, size=k)] \
                + self.bandwidth * rng.standard_normal(k)
            bad = out < 0
        return out


def fit_peak_kde(history) -> KdeModel:
    """Gaussian KDE with bandwidth ``1.06 * std * n**(-1/5)``."""
    x = np.asarray(history, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("cannot fit a KDE to an empty history")
    std = float(x.std(ddof=1)) if x.size > 1 else 0.0
    if std > 0:
        bw = 1.06 * std * x.size ** -0.2
    else:
        bw = 0.1 * abs(float(x.mean())) + 1e-6
    return KdeModel(x, bw)


@dataclass(frozen=True)
class ScenarioSet:
    scenarios: np.ndarray   # (N, H) kW
    peaks: np.ndarray       # (N,) drawn peak magnitudes

    def __post_init__(self):
        sc = np.atleast_2d(np.asarray(self.scenarios, dtype=float))
        if np.any(sc < 0):
            raise ValidationError("scenario loads must be non-negative")
        object.__setattr__(self, "scenarios", sc)
        object.__setattr__(self, "peaks", np.asarray(self.peaks, dtype=float))

    def __len__(self):
        return 0 if self.scenarios.size == 0 else self.scenarios.shape[0]

    @property
    def weights(self) -> np.ndarray:
        n = len(self)
        return np.full(n, 1.0 / n) if n else np.zeros(0)

    @classmethod
    def empty(cls, slots: int) -> "ScenarioSet":
        return cls(np.zeros((0, slots)), np.zeros(0))


def sample_scenarios(kde: KdeModel, n: int, shape_day, rng=None, horizon_days: int = 1) -> ScenarioSet:
    """Scale ``shape_day`` to ``n`` sampled peak magnitudes.

    With ``horizon_days > 1`` each magnitude is the largest of that many
    draws, i.e. the peak over the remaining days of the cycle.
    """
    if n < 1:
        raise ValidationError("need at least one scenario")
    shape = np.asarray(shape_day, dtype=float)
    top = float(shape.max()) if shape.size else 0.0
    if not top > 0:
        raise ValidationError("reference day must have a positive maximum")
    rng = np.random.default_rng(rng)
    k = max(1, int(horizon_days))
    peaks = kde.sample(n * k, rng).reshape(n, k).max(axis=1)
    scen = shape[None, :] * (peaks[:, None] / top)
    scen[:, int(np.argmax(shape))] = peaks  # exact peak despite rounding
    return ScenarioSet(scen, peaks)


@dataclass(frozen=True)
class RuntimeState:
    historical_peak: float = 0.0
    peak_hour: int | None = None
    day_index: int = 0
    energy_cost: float = 0.0
    degradation: float = 0.0


@dataclass(frozen=True)
class DayDecision:
    power: np.ndarray
    soe: np.ndarray
    degradation: float
    expected_objective: float


def solve_day(state: RuntimeState, today_load, scenarios: ScenarioSet, battery: BatterySpec,
              curve: DegradationCurve, tariff: TariffModel, month: int, bound: str,
              interval_minutes: int = 15, backend: str = "auto") -> DayDecision:
    """Two-stage sample-average program for one operating day.

    First stage: today's dispatch and degradation, priced with today's
    energy charge. Second stage, per scenario: a recourse dispatch on the
    scenario's peak day and a cycle peak ``M_s`` no lower than the realized
    peak so far, today's net load, and the scenario's net load. Each
    scenario contributes its degradation plus the bound demand rate times
    ``M_s``, weighted ``1/N``.
    """
    load = np.asarray(today_load, dtype=float)
    dt = interval_minutes / 60.0
    price = tariff.slot_energy_price(month, interval_minutes)
    if load.shape != price.shape:
        raise ValidationError(f"today's load has {load.size} slots, expected {price.size}")
    p_d = tariff.bound_price(month, bound)
    hist = float(state.historical_peak)

    b = Builder()
    today = add_battery_day(b, battery, curve, dt, price)
    b.offset = float(load @ price * dt)
    top = max(hist, load.max() + battery.p_max)
    today_peak = int(b.var(1, load.min() + battery.p_min, top)[0])
    add_peak_rows(b, today, today_peak, load)
    n = len(scenarios)
    if n == 0:
        peak = int(b.var(1, hist, top, p_d)[0])
        b.le([[today_peak, peak]], [[1.0, -1.0]], [0.0])
    else:
        zero_price = np.zeros_like(price)
        for scen in scenarios.scenarios:
            rec = add_battery_day(b, battery, curve, dt, zero_price, weight=1.0 / n)
            hi = max(top, scen.max() + battery.p_max)
            m_s = int(b.var(1, hist, hi, p_d / n)[0])
            b.le([[today_peak, m_s]], [[1.0, -1.0]], [0.0])
            add_peak_rows(b, rec, m_s, scen)

    sol = solve_lp(b.build(), backend=backend)
    if sol.status != "optimal":
        raise SolverError(f"runtime day {state.day_index}: solver returned {sol.status}")
    power = today.power(sol.x)
    soe = today.soe_trajectory(sol.x, battery, dt)
    deg = daily_degradation(curve, soe, battery.soe_max, battery.soe_ini)
    return DayDecision(power, soe, deg, sol.objective_value)


@dataclass
class RuntimeResult:
    cycle: BillingCycle
    bound: str
    plan: DispatchPlan
    trace: list = field(default_factory=list)
    expected_objectives: list = field(default_factory=list)
    bill: BillBreakdown = None
    relaxed_bill: float = 0.0

    @property
    def degradation(self) -> float:
        return float(self.plan.per_day_degradation.sum())


def run_cycle(cycle: BillingCycle, kde: KdeModel, shape_day, battery: BatterySpec,
              curve: DegradationCurve, tariff: TariffModel, bound: str,
              n_scenarios: int = 20, seed: int = 0, forecast_noise: float = 0.0,
              forecast=None, scenario_source=None, backend: str = "auto") -> RuntimeResult:
    """Operate a whole billing cycle one day at a time.

    Day ``i``'s decision uses only the forecast for day ``i``, the realized
    net loads of days before it, and scenarios for the remaining days.
    ``forecast(i)`` overrides the default (actual load times
    ``1 + forecast_noise * N(0, 1)``); ``scenario_source(i, remaining)``
    overrides KDE sampling and must return a :class:`ScenarioSet`.
    """
    H = cycle.slots_per_day
    rng = np.random.default_rng([seed, 0])
    noise_rng = np.random.default_rng([seed, 1])
    state = RuntimeState()
    trace, objectives = [state], []
    powers, soes, degs = [], [], []
    for i in range(cycle.n_days):
        actual = cycle.days[i]
        if forecast is not None:
            today = np.asarray(forecast(i), dtype=float)
        elif forecast_noise:
            today = np.clip(actual * (1.0 + forecast_noise * noise_rng.standard_normal(H)), 0, None)
        else:
            today = actual
        remaining = cycle.n_days - i - 1
        if remaining == 0:
            scen = ScenarioSet.empty(H)
        elif scenario_source is not None:
            scen = scenario_source(i, remaining)
        else:
            scen = sample_scenarios(kde, n_scenarios, shape_day, rng, horizon_days=remaining)
        dec = solve_day(state, today, scen, battery, curve, tariff, cycle.month, bound,
                        cycle.interval_minutes, backend)
        net = actual + dec.power
        price = tariff.slot_energy_price(cycle.month, cycle.interval_minutes)
        day_peak = float(net.max())
        hour = int(np.argmax(net) * cycle.interval_minutes // 60)
        state = replace(
            state,
            historical_peak=max(state.historical_peak, day_peak),
            peak_hour=hour if day_peak > state.historical_peak else state.peak_hour,
            day_index=i + 1,
            energy_cost=state.energy_cost + float(net @ price) * cycle.dt_hours,
            degradation=state.degradation + dec.degradation,
        )
        trace.append(state)
        objectives.append(dec.expected_objective)
        powers.append(dec.power)
        soes.append(dec.soe)
        degs.append(dec.degradation)

    zeros = np.zeros(cycle.days.shape)
    plan = DispatchPlan(np.array(powers), zeros, zeros.copy(), np.array(degs), np.array(soes))
    net_cycle = cycle.with_days(plan.net_load(cycle.days))
    return RuntimeResult(cycle, bound, plan, trace, objectives,
                         bill(tariff, net_cycle), relaxed_bill(tariff, net_cycle, bound))

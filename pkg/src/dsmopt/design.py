"""Perfect-foresight billing-cycle dispatch and life-cycle payback.

Each billing cycle is solved as one linear program with the demand rate
relaxed to the highest ("hi") or lowest ("lo") rate in the peak window;
the two solves bracket the true time-of-peak bill.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._formulation import Builder, add_battery_day, add_peak_rows
from .core import BatterySpec, BillingCycle, HvacParams, LoadProfile, slice_cycles
from .degradation import DegradationCurve, daily_degradation, zero_curve
from .errors import SolverError, ValidationError
from .lp import solve_lp, solve_milp
from .tariff import BOUNDS, BillBreakdown, TariffModel, bill, relaxed_bill, verify_peak_window

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DispatchPlan:
    """Per-day, per-slot battery and HVAC schedule for one billing cycle."""

    battery_power: np.ndarray
    hvac_pre: np.ndarray
    hvac_post: np.ndarray
    per_day_degradation: np.ndarray
    soe_trajectory: np.ndarray

    @property
    def hvac_delta(self) -> np.ndarray:
        return self.hvac_pre + self.hvac_post

    def net_load(self, load_days) -> np.ndarray:
        return np.asarray(load_days, dtype=float) + self.battery_power + self.hvac_delta

    @property
    def throughput_per_day(self) -> np.ndarray:
        """Discharged energy per day in kWh (per unit ``dt``)."""
        return np.sum(np.clip(-self.battery_power, 0.0, None), axis=1)

    def check(self, battery: BatterySpec, tol: float = 1e-7) -> None:
        """Raise ``AssertionError`` unless power, energy and end-of-day
        limits hold within ``tol``."""
        p, soe = self.battery_power, self.soe_trajectory
        assert np.all(p >= battery.p_min - tol) and np.all(p <= battery.p_max + tol), "power box"
        assert np.all(soe >= -tol) and np.all(soe <= battery.soe_max + tol), "energy box"
        assert np.all(np.abs(soe[:, -1] - battery.soe_ini) <= tol), "end-of-day energy"
        assert np.all(self.per_day_degradation >= 0), "negative degradation"


@dataclass
class CycleProblem:
    lp: object
    days: list
    peak: int
    hvac_pre: np.ndarray
    hvac_post: np.ndarray


def hvac_deltas(cycle: BillingCycle, hvac: HvacParams | None, windows):
    """Stack per-day pre/post-cooling adjustments; ``windows[i]`` is a
    ``(pre_start, post_start)`` pair or ``None`` for no HVAC action."""
    pre = np.zeros(cycle.days.shape)
    post = np.zeros(cycle.days.shape)
    if hvac is None or windows is None:
        return pre, post
    if len(windows) != cycle.n_days:
        raise ValidationError(f"{len(windows)} HVAC windows for {cycle.n_days} days")
    for i, pair in enumerate(windows):
        if pair is not None:
            pre[i], post[i] = hvac.deltas(cycle.days[i], *pair, cycle.interval_minutes)
    return pre, post


def build_cycle_problem(cycle: BillingCycle, battery: BatterySpec, curve: DegradationCurve,
                        tariff: TariffModel, bound: str, hvac: HvacParams | None = None,
                        windows=None, encoding: str = "epigraph") -> CycleProblem:
    """Assemble the cycle LP (or the SOS2 MILP with ``encoding="sos2"``).

    Variables are per-slot battery power and energy for each day, each day's
    deepest depth and degradation cost, and one cycle peak ``M``. The
    objective is degradation + energy charge + bound rate * ``M``.
    """
    p_d = tariff.bound_price(cycle.month, bound)
    price = tariff.slot_energy_price(cycle.month, cycle.interval_minutes)
    dt = cycle.dt_hours
    pre, post = hvac_deltas(cycle, hvac, windows)
    base = cycle.days + pre + post

    b = Builder()
    days = [add_battery_day(b, battery, curve, dt, price, encoding=encoding)
            for _ in range(cycle.n_days)]
    peak = int(b.var(1, base.min() + battery.p_min, base.max() + battery.p_max, p_d)[0])
    for day, load in zip(days, base):
        add_peak_rows(b, day, peak, load)
    b.offset = float(np.sum(base @ price) * dt)
    return CycleProblem(b.build(), days, peak, pre, post)


@dataclass(frozen=True)
class CycleResult:
    cycle: BillingCycle
    bound: str
    plan: DispatchPlan
    objective: float
    bill: BillBreakdown
    relaxed_bill: float
    verified: bool

    @property
    def degradation(self) -> float:
        return float(self.plan.per_day_degradation.sum())

    @property
    def exact_cost(self) -> float:
        """Exact time-of-peak bill plus degradation."""
        return self.bill.total + self.degradation


def _extract(problem: CycleProblem, x, cycle, battery, curve) -> DispatchPlan:
    dt = cycle.dt_hours
    power = np.array([d.power(x) for d in problem.days])
    soe = np.array([d.soe_trajectory(x, battery, dt) for d in problem.days])
    deg = np.array([daily_degradation(curve, s, battery.soe_max, battery.soe_ini) for s in soe])
    return DispatchPlan(power, problem.hvac_pre, problem.hvac_post, deg, soe)


def optimize_cycle(cycle: BillingCycle, battery: BatterySpec, curve: DegradationCurve,
                   tariff: TariffModel, bound: str, hvac: HvacParams | None = None,
                   windows=None, encoding: str = "epigraph", backend: str = "auto",
                   price_curve: DegradationCurve | None = None) -> CycleResult:
    """Solve one cycle and re-price the result with the exact tariff.

    ``price_curve`` (default ``curve``) values the realized degradation; a
    degradation-blind run optimizes with a zero curve and prices with the
    true one.
    """
    problem = build_cycle_problem(cycle, battery, curve, tariff, bound, hvac, windows, encoding)
    solve = solve_milp if problem.lp.binaries else solve_lp
    sol = solve(problem.lp, backend=backend)
    if sol.status != "optimal":
        raise SolverError(
            f"cycle {cycle.year}-{cycle.month:02d} ({bound} bound): solver returned {sol.status}")
    plan = _extract(problem, sol.x, cycle, battery, price_curve or curve)
    net = cycle.with_days(plan.net_load(cycle.days))
    return CycleResult(cycle, bound, plan, sol.objective_value, bill(tariff, net),
                       relaxed_bill(tariff, net, bound), verify_peak_window(tariff, net))


def _one_day(cycle: BillingCycle, i: int) -> BillingCycle:
    return BillingCycle(cycle.year, cycle.month, cycle.days[i:i + 1], cycle.interval_minutes)


def enumerate_hvac_windows(day: BillingCycle, hvac: HvacParams, battery: BatterySpec,
                           curve: DegradationCurve, tariff: TariffModel, bound: str,
                           backend: str = "auto"):
    """Best ``(pre_start, post_start)`` for a one-day cycle by exhaustive search.

    Every admissible pair is solved with the battery; ties keep the earliest
    pre-cooling start, then the earliest post-cooling start. Returns
    ``(pair, objective)``.
    """
    pairs = hvac.window_pairs()
    if not pairs:
        raise ValidationError(
            f"no admissible HVAC windows: {hvac.pre_hours} h pre-cooling and "
            f"{hvac.post_hours} h post-cooling cannot be ordered within a day")
    best, best_obj = None, np.inf
    for pair in pairs:
        res = optimize_cycle(day, battery, curve, tariff, bound, hvac, [pair], backend=backend)
        if best is None or res.objective < best_obj - 1e-9 * max(1.0, abs(best_obj)):
            best, best_obj = pair, res.objective
    return best, best_obj


def choose_hvac_windows(cycle, hvac, battery, curve, tariff, bound, backend="auto"):
    """Per-day windows; a day keeps ``None`` unless HVAC strictly helps it."""
    windows = []
    for i in range(cycle.n_days):
        day = _one_day(cycle, i)
        plain = optimize_cycle(day, battery, curve, tariff, bound, backend=backend).objective
        pair, obj = enumerate_hvac_windows(day, hvac, battery, curve, tariff, bound, backend)
        windows.append(pair if obj < plain - 1e-9 * max(1.0, abs(plain)) else None)
    return windows


@dataclass(frozen=True)
class CycleAssessment:
    year: int
    month: int
    bound: str
    baseline_bill: float        # no battery/HVAC, peak at the bound rate
    optimized_bill: float       # energy + bound rate * optimized peak
    baseline_exact: float
    optimized_exact: float
    degradation: float
    objective: float
    verified: bool
    hvac_days: int = 0

    @property
    def saving(self) -> float:
        return self.baseline_bill - self.optimized_bill

    @property
    def net_saving(self) -> float:
        return self.saving - self.degradation


@dataclass
class AssessmentReport:
    cycles: list = field(default_factory=list)
    results: dict = field(default_factory=dict)  # (year, month, bound) -> CycleResult

    def for_bound(self, bound: str) -> list[CycleAssessment]:
        return [c for c in self.cycles if c.bound == bound]

    def annual_saving(self, bound: str) -> float:
        return float(sum(c.saving for c in self.for_bound(bound)))

    def annual_degradation(self, bound: str) -> float:
        return float(sum(c.degradation for c in self.for_bound(bound)))

    def unverified(self) -> list[CycleAssessment]:
        return [c for c in self.cycles if not c.verified]

    @property
    def bounds(self) -> list[str]:
        return [b for b in BOUNDS if self.for_bound(b)]


def assess_cycle(cycle, battery, curve, tariff, bound, hvac=None, degradation_blind=False,
                 backend="auto") -> tuple[CycleAssessment, CycleResult]:
    opt_curve = zero_curve(curve.segments) if degradation_blind else curve
    result = optimize_cycle(cycle, battery, opt_curve, tariff, bound, backend=backend,
                            price_curve=curve)
    hvac_days = 0
    if hvac is not None:
        windows = choose_hvac_windows(cycle, hvac, battery, opt_curve, tariff, bound, backend)
        if any(w is not None for w in windows):
            with_hvac = optimize_cycle(cycle, battery, opt_curve, tariff, bound, hvac, windows,
                                       backend=backend, price_curve=curve)
            # HVAC is optional, so the battery-only plan stays admissible
            if with_hvac.objective <= result.objective:
                result = with_hvac
                hvac_days = sum(w is not None for w in windows)
    baseline = bill(tariff, cycle)
    assessment = CycleAssessment(
        cycle.year, cycle.month, bound,
        baseline_bill=relaxed_bill(tariff, cycle, bound),
        optimized_bill=result.relaxed_bill,
        baseline_exact=baseline.total,
        optimized_exact=result.bill.total,
        degradation=result.degradation,
        objective=result.objective,
        verified=result.verified,
        hvac_days=hvac_days,
    )
    return assessment, result


def annual_assessment(profile: LoadProfile, battery: BatterySpec, curve: DegradationCurve,
                      tariff: TariffModel, hvac: HvacParams | None = None,
                      bounds=BOUNDS, degradation_blind: bool = False,
                      backend: str = "auto") -> AssessmentReport:
    """Optimize every billing cycle of ``profile`` at each requested bound.

    With ``degradation_blind`` the dispatch ignores wear and the resulting
    schedule is charged with the true curve afterwards.
    """
    cycles = slice_cycles(profile)
    report = AssessmentReport()
    for cycle in cycles:
        for bound in bounds:
            assessment, result = assess_cycle(cycle, battery, curve, tariff, bound, hvac,
                                              degradation_blind, backend)
            if not assessment.verified:
                log.warning("%d-%02d (%s): optimized peak falls outside the peak window",
                            cycle.year, cycle.month, bound)
            report.cycles.append(assessment)
            report.results[(cycle.year, cycle.month, bound)] = result
    return report


@dataclass(frozen=True)
class Payback:
    years: float | None    # None when the net annual saving is not positive
    salvage_fraction: float | None


def payback_from_totals(annual_saving: float, annual_degradation: float,
                        battery: BatterySpec) -> Payback:
    """Years to recover battery + inverter capital from net annual saving,
    and the share of battery value left at that point."""
    net = annual_saving - annual_degradation
    if net <= 0:
        return Payback(None, None)
    years = battery.capital_cost / net
    if battery.capital_cost_battery <= 0:
        return Payback(years, 1.0)
    salvage = 1.0 - years * annual_degradation / battery.capital_cost_battery
    return Payback(years, float(np.clip(salvage, 0.0, 1.0)))


def payback(report: AssessmentReport, battery: BatterySpec) -> dict[str, Payback]:
    return {b: payback_from_totals(report.annual_saving(b), report.annual_degradation(b), battery)
            for b in report.bounds}

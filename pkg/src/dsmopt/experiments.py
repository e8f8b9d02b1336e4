"""Design-phase versus runtime comparison over a test year."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BillingCycle, LoadProfile, slice_cycles
from .design import optimize_cycle
from .errors import ValidationError
from .runtime import fit_peak_kde, run_cycle
from .tariff import BOUNDS, relaxed_bill


@dataclass(frozen=True)
class CycleComparison:
    year: int
    month: int
    bound: str
    baseline_bill: float
    design_bill: float
    design_degradation: float
    runtime_bill: float
    runtime_degradation: float
    design_plan: object = field(default=None, repr=False, compare=False)
    runtime_plan: object = field(default=None, repr=False, compare=False)

    @property
    def design_saving(self) -> float:
        """Bill saving net of degradation, demand priced at the bound rate."""
        return self.baseline_bill - self.design_bill - self.design_degradation

    @property
    def runtime_saving(self) -> float:
        return self.baseline_bill - self.runtime_bill - self.runtime_degradation

    @property
    def ratio(self) -> float:
        """Runtime over design saving; 1 when both are zero."""
        if abs(self.design_saving) < 1e-9:
            return 1.0 if abs(self.runtime_saving) < 1e-9 else float(np.sign(self.runtime_saving)) * np.inf
        return self.runtime_saving / self.design_saving

    def as_row(self) -> dict:
        return {
            "year": self.year, "month": self.month, "bound": self.bound,
            "baseline_bill": self.baseline_bill,
            "design_bill": self.design_bill, "design_degradation": self.design_degradation,
            "design_saving": self.design_saving,
            "runtime_bill": self.runtime_bill, "runtime_degradation": self.runtime_degradation,
            "runtime_saving": self.runtime_saving, "ratio": self.ratio,
        }


@dataclass
class ComparisonReport:
    cycles: list = field(default_factory=list)

    def for_bound(self, bound):
        return [c for c in self.cycles if c.bound == bound]

    def design_saving(self, bound) -> float:
        return float(sum(c.design_saving for c in self.for_bound(bound)))

    def runtime_saving(self, bound) -> float:
        return float(sum(c.runtime_saving for c in self.for_bound(bound)))

    def ratio(self, bound) -> float:
        d, r = self.design_saving(bound), self.runtime_saving(bound)
        if abs(d) < 1e-9:
            return 1.0 if abs(r) < 1e-9 else float(np.sign(r)) * np.inf
        return r / d

    @property
    def bounds(self):
        return [b for b in BOUNDS if self.for_bound(b)]

    def monthly_series(self) -> list[dict]:
        """Monthly operating cost (bill + degradation) per strategy."""
        rows = []
        for c in self.cycles:
            rows.append({
                "year": c.year, "month": c.month, "bound": c.bound,
                "baseline_cost": c.baseline_bill,
                "design_cost": c.design_bill + c.design_degradation,
                "runtime_cost": c.runtime_bill + c.runtime_degradation,
            })
        return rows


def training_month(train_cycles: list[BillingCycle], month: int) -> BillingCycle:
    for c in train_cycles:
        if c.month == month:
            return c
    raise ValidationError(f"training data has no month {month}")


def compare_cycle(cycle, train, battery, curve, tariff, bound, n_scenarios=20, seed=0,
                  forecast_noise=0.0, backend="auto") -> CycleComparison:
    """Design-phase optimum versus the runtime controller on one cycle.

    The KDE is fitted to the daily peaks of ``train`` (the same calendar
    month of the training year) and scenarios take the shape of its peak day.
    """
    design = optimize_cycle(cycle, battery, curve, tariff, bound, backend=backend)
    peaks = train.days.max(axis=1)
    kde = fit_peak_kde(peaks)
    shape = train.days[int(np.argmax(peaks))]
    run = run_cycle(cycle, kde, shape, battery, curve, tariff, bound, n_scenarios,
                    seed=seed, forecast_noise=forecast_noise, backend=backend)
    return CycleComparison(cycle.year, cycle.month, bound,
                           relaxed_bill(tariff, cycle, bound),
                           design.relaxed_bill, design.degradation,
                           run.relaxed_bill, run.degradation, design.plan, run.plan)


def compare_runtime(train: LoadProfile, test: LoadProfile, battery, curve, tariff,
                    bounds=BOUNDS, n_scenarios: int = 20, seed: int = 0,
                    forecast_noise: float = 0.0, backend: str = "auto") -> ComparisonReport:
    train_cycles = slice_cycles(train)
    report = ComparisonReport()
    for k, cycle in enumerate(slice_cycles(test)):
        src = training_month(train_cycles, cycle.month)
        for bound in bounds:
            report.cycles.append(compare_cycle(cycle, src, battery, curve, tariff, bound,
                                               n_scenarios, seed + k, forecast_noise, backend))
    return report

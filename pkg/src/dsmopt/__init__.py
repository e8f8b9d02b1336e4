"""Battery and HVAC demand-side management under time-of-peak demand charges."""

__version__ = "0.1.0"

from .core import (BatterySpec, BillingCycle, HvacParams, LoadProfile, net_load,  # noqa: E402
                   slice_cycles)
from .degradation import (CycleLifeFit, DegradationCurve, build_curve,  # noqa: E402
                          daily_degradation, fit_cycle_life)
from .design import annual_assessment, optimize_cycle, payback  # noqa: E402
from .errors import DsmError, SolverError, ValidationError  # noqa: E402
from .runtime import fit_peak_kde, run_cycle, sample_scenarios, solve_day  # noqa: E402
from .tariff import TariffModel, bill, relaxed_bill, verify_peak_window  # noqa: E402

__all__ = [
    "BatterySpec", "BillingCycle", "HvacParams", "LoadProfile", "net_load", "slice_cycles",
    "CycleLifeFit", "DegradationCurve", "build_curve", "daily_degradation", "fit_cycle_life",
    "annual_assessment", "optimize_cycle", "payback",
    "DsmError", "SolverError", "ValidationError",
    "fit_peak_kde", "run_cycle", "sample_scenarios", "solve_day",
    "TariffModel", "bill", "relaxed_bill", "verify_peak_window",
]

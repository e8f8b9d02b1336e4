"""Cycle-life fitting and piecewise-linear discharge degradation cost.

Cycle life is modelled log-linear in depth of discharge,
``cycles(D) = 10 ** (a + b * D)``, and a discharge from full down to depth
``D`` costs ``capital / cycles(D)``. That cost is convex in ``D`` so the
optimizers can carry it as a max of chord lines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class CycleLifeFit:
    a: float
    b: float

    def __post_init__(self):
        if not self.b < 0:
            raise ValidationError(f"cycle-life slope must be negative, got b={self.b}")


def fit_cycle_life(points) -> CycleLifeFit:
    """Least-squares line through ``(DoD, log10(cycles))``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValidationError("need at least two (DoD, cycles) points")
    dod, cycles = pts[:, 0], pts[:, 1]
    if np.any(cycles <= 0):
        raise ValidationError("cycle counts must be positive")
    if np.any(dod <= 0) or np.any(dod > 1):
        raise ValidationError("test depths must lie in (0, 1]")
    if np.ptp(dod) == 0:
        raise ValidationError("all test depths are identical; the fit is degenerate")
    X = np.column_stack([np.ones_like(dod), dod])
    (a, b), *_ = np.linalg.lstsq(X, np.log10(cycles), rcond=None)
    if not b < 0:
        raise ValidationError(f"fitted cycle life does not decay with depth (b={b:.4g})")
    return CycleLifeFit(float(a), float(b))


def _check_depth(depth):
    d = np.asarray(depth, dtype=float)
    if np.any(d < 0) or np.any(d > 1) or not np.all(np.isfinite(d)):
        raise ValidationError(f"depth of discharge {depth} outside [0, 1]")
    return d


def cycle_life(fit: CycleLifeFit, depth):
    d = _check_depth(depth)
    out = 10.0 ** (fit.a + fit.b * d)
    return float(out) if out.ndim == 0 else out


def discharge_cost(fit: CycleLifeFit, capital: float, d1: float, d2: float) -> float:
    """Cost of discharging from depth ``d1`` to ``d2``; zero when charging."""
    if capital < 0:
        raise ValidationError("capital cost must be non-negative")
    _check_depth([d1, d2])
    return capital * max(0.0, 1.0 / cycle_life(fit, d2) - 1.0 / cycle_life(fit, d1))


@dataclass(frozen=True)
class DegradationCurve:
    """Convex piecewise-linear cost of a discharge from full to a given depth."""

    dod_x: np.ndarray
    cost_y: np.ndarray

    def __post_init__(self):
        x = np.array(self.dod_x, dtype=float)
        y = np.array(self.cost_y, dtype=float)
        if x.shape != y.shape or x.size < 2:
            raise ValidationError("dod_x and cost_y need equal length >= 2")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise ValidationError("breakpoints must increase strictly from 0 to 1")
        if np.any(np.diff(y) < 0):
            raise ValidationError("costs must be non-decreasing")
        slopes = np.diff(y) / np.diff(x)
        if np.any(np.diff(slopes) < -1e-12 * max(1.0, float(np.max(np.abs(slopes))))):
            raise ValidationError("cost curve is not convex")
        for arr in (x, y):
            arr.setflags(write=False)
        object.__setattr__(self, "dod_x", x)
        object.__setattr__(self, "cost_y", y)

    @property
    def segments(self) -> int:
        return self.dod_x.size - 1

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.cost_y) / np.diff(self.dod_x)

    @property
    def intercepts(self) -> np.ndarray:
        return self.cost_y[:-1] - self.slopes * self.dod_x[:-1]

    @property
    def segment_lines(self) -> list[tuple[float, float]]:
        return list(zip(self.slopes.tolist(), self.intercepts.tolist()))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.cost_y)


def build_curve(fit: CycleLifeFit, capital: float, segments: int = 10) -> DegradationCurve:
    """Sample ``capital / cycles(D)`` at ``segments + 1`` uniform depths."""
    if segments < 2:
        raise ValidationError("need at least two segments")
    if capital < 0:
        raise ValidationError("capital cost must be non-negative")
    x = np.linspace(0.0, 1.0, segments + 1)
    return DegradationCurve(x, capital / cycle_life(fit, x))


def zero_curve(segments: int = 10) -> DegradationCurve:
    """A curve that prices every discharge at zero (degradation-blind runs)."""
    return DegradationCurve(np.linspace(0.0, 1.0, segments + 1), np.zeros(segments + 1))


def pw_cost(curve: DegradationCurve, depth):
    """Piecewise-linear cost at ``depth`` (scalar or array)."""
    d = _check_depth(depth)
    out = np.interp(d, curve.dod_x, curve.cost_y)
    return float(out) if out.ndim == 0 else out


def daily_degradation(curve: DegradationCurve, soe, soe_max: float, soe_ini: float) -> float:
    """Cost of one day's operation: the deepest discharge reached, measured
    from the day's starting depth."""
    if soe_max <= 0:
        return 0.0
    soe = np.asarray(soe, dtype=float)
    deepest = float(np.clip(1.0 - np.min(soe, initial=soe_ini) / soe_max, 0.0, 1.0))
    start = 1.0 - soe_ini / soe_max
    return max(0.0, pw_cost(curve, deepest) - pw_cost(curve, start))

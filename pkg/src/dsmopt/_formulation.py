"""Sparse assembly of the battery-day blocks shared by the design-phase and
runtime programs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .degradation import DegradationCurve, pw_cost
from .errors import ValidationError
from .lp import LinearProgram


class Builder:
    """Accumulates variables and constraint rows in COO form."""

    def __init__(self):
        self._c, self._lo, self._hi = [], [], []
        self._n = 0
        self._ub = ([], [], [], [])  # rows, cols, vals, rhs
        self._eq = ([], [], [], [])
        self._m_ub = 0
        self._m_eq = 0
        self.binaries = []
        self.offset = 0.0

    def var(self, size, lo, hi, cost=0.0):
        idx = np.arange(self._n, self._n + size)
        self._n += size
        self._lo.append(np.broadcast_to(np.asarray(lo, dtype=float), (size,)))
        self._hi.append(np.broadcast_to(np.asarray(hi, dtype=float), (size,)))
        self._c.append(np.broadcast_to(np.asarray(cost, dtype=float), (size,)))
        return idx

    def _rows(self, store, start, cols, vals, rhs):
        cols = np.atleast_2d(np.asarray(cols))
        vals = np.broadcast_to(np.asarray(vals, dtype=float), cols.shape)
        k = cols.shape[0]
        rows = np.repeat(np.arange(start, start + k), cols.shape[1])
        store[0].append(rows)
        store[1].append(cols.ravel())
        store[2].append(vals.ravel())
        store[3].append(np.broadcast_to(np.asarray(rhs, dtype=float), (k,)))
        return k

    def le(self, cols, vals, rhs):
        """Rows ``sum(vals * x[cols]) <= rhs``; one row per line of ``cols``."""
        self._m_ub += self._rows(self._ub, self._m_ub, cols, vals, rhs)

    def eq(self, cols, vals, rhs):
        self._m_eq += self._rows(self._eq, self._m_eq, cols, vals, rhs)

    def _matrix(self, store, m):
        if not store[0]:
            return sp.csr_matrix((0, self._n)), np.zeros(0)
        A = sp.csr_matrix((np.concatenate(store[2]),
                           (np.concatenate(store[0]), np.concatenate(store[1]))),
                          shape=(m, self._n))
        return A, np.concatenate(store[3])

    def build(self) -> LinearProgram:
        A_ub, b_ub = self._matrix(self._ub, self._m_ub)
        A_eq, b_eq = self._matrix(self._eq, self._m_eq)
        return LinearProgram(np.concatenate(self._c), A_ub, b_ub, A_eq, b_eq,
                             np.concatenate(self._lo), np.concatenate(self._hi),
                             binaries=tuple(self.binaries), offset=self.offset)


@dataclass
class DayVars:
    """Variable indices of one battery day."""

    charge: np.ndarray          # grid-side charging power (or signed power)
    discharge: np.ndarray | None  # separate discharge leg when efficiency < 1
    soe: np.ndarray
    depth: int | None = None
    degradation: int | None = None

    def power_terms(self):
        """(cols, coeffs) of grid-side battery power per slot, shape (H, k)."""
        if self.discharge is None:
            return self.charge[:, None], np.ones((self.charge.size, 1))
        cols = np.column_stack([self.charge, self.discharge])
        return cols, np.ones(cols.shape)

    def power(self, x):
        p = x[self.charge]
        if self.discharge is not None:
            p = p + x[self.discharge]
        return p

    def soe_trajectory(self, x, battery, dt):
        """State of energy implied by the solved power, not the solver's
        own soe columns, so the dynamics hold exactly."""
        if self.discharge is None:
            stored = x[self.charge]
        else:
            stored = battery.round_trip_efficiency * x[self.charge] + x[self.discharge]
        return battery.soe_ini + np.cumsum(stored * dt)


def add_battery_day(b: Builder, battery, curve: DegradationCurve, dt: float,
                    energy_price=None, weight: float = 1.0,
                    encoding: str = "epigraph") -> DayVars:
    """One day of battery operation.

    Adds power bounds, cumulative state-of-energy limits, the return to the
    initial state at day end, and the day's degradation cost
    ``pw(deepest DoD) - pw(initial DoD)`` weighted by ``weight``.
    """
    H = energy_price.size
    price = energy_price * dt * weight
    eta = battery.round_trip_efficiency
    if eta < 1.0:
        charge = b.var(H, 0.0, battery.p_max, price)
        discharge = b.var(H, battery.p_min, 0.0, price)
    else:
        charge = b.var(H, battery.p_min, battery.p_max, price)
        discharge = None
    soe = b.var(H, 0.0, battery.soe_max)

    # soe[t] - soe[t-1] - dt * (eta * charge[t] + discharge[t]) = 0
    prev = np.concatenate([[soe[0]], soe[:-1]])
    cols = [soe[:, None], prev[:, None], charge[:, None]]
    vals = [np.ones((H, 1)), -np.ones((H, 1)), np.full((H, 1), -dt * eta)]
    if discharge is not None:
        cols.append(discharge[:, None])
        vals.append(np.full((H, 1), -dt))
    cols = np.hstack(cols)
    vals = np.hstack(vals)
    vals[0, 1] = 0.0  # first slot starts from the constant initial state
    rhs = np.zeros(H)
    rhs[0] = battery.soe_ini
    b.eq(cols, vals, rhs)
    b.eq([[soe[-1]]], [[1.0]], [battery.soe_ini])

    day = DayVars(charge, discharge, soe)
    if battery.soe_max <= 0 or curve.is_zero:
        return day

    dod0 = battery.dod_ini
    pw0 = pw_cost(curve, dod0)
    day.depth = int(b.var(1, dod0, 1.0)[0])
    day.degradation = int(b.var(1, 0.0, max(0.0, curve.cost_y[-1] - pw0), weight)[0])
    # depth >= 1 - soe[t] / soe_max
    b.le(np.column_stack([np.full(H, day.depth), soe]),
         [-1.0, -1.0 / battery.soe_max], -1.0)

    if encoding == "epigraph":
        S = curve.segments
        b.le(np.column_stack([np.full(S, day.depth), np.full(S, day.degradation)]),
             np.column_stack([curve.slopes, -np.ones(S)]), pw0 - curve.intercepts)
    elif encoding == "sos2":
        S = curve.segments
        w = b.var(S + 1, 0.0, 1.0)
        z = b.var(S, 0.0, 1.0)
        b.binaries.extend(z.tolist())
        b.eq([w], [np.ones(S + 1)], [1.0])
        b.eq([z], [np.ones(S)], [1.0])
        b.eq([np.concatenate([w, [day.depth]])],
             [np.concatenate([curve.dod_x, [-1.0]])], [0.0])
        b.eq([np.concatenate([w, [day.degradation]])],
             [np.concatenate([-curve.cost_y, [1.0]])], [-pw0])
        # a weight may be positive only next to the selected segment
        b.le([[w[0], z[0]]], [[1.0, -1.0]], [0.0])
        b.le([[w[S], z[S - 1]]], [[1.0, -1.0]], [0.0])
        if S > 1:
            b.le(np.column_stack([w[1:S], z[:S - 1], z[1:S]]), [1.0, -1.0, -1.0], 0.0)
    else:
        raise ValidationError(f"unknown degradation encoding {encoding!r}")
    return day


def add_peak_rows(b: Builder, day: DayVars, peak_var: int, base_load):
    """``base_load[t] + battery power[t] <= peak`` for every slot."""
    cols, vals = day.power_terms()
    H = cols.shape[0]
    b.le(np.column_stack([cols, np.full(H, peak_var)]),
         np.column_stack([vals, -np.ones(H)]), -np.asarray(base_load, dtype=float))

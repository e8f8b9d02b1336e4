import itertools
from datetime import datetime

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsmopt.core import BatterySpec, BillingCycle, HvacParams, LoadProfile
from dsmopt.degradation import build_curve, fit_cycle_life, zero_curve
from dsmopt.design import (annual_assessment, assess_cycle, build_cycle_problem,
                           choose_hvac_windows, enumerate_hvac_windows, optimize_cycle, payback,
                           payback_from_totals)
from dsmopt.errors import ValidationError
from dsmopt.synthetic import office_year
from dsmopt.tariff import TariffModel, relaxed_bill

from conftest import flat_tariff, peaky_cycle, small_battery
from oracles import bill_naive

ZERO = BatterySpec(0.0, 0.0, 0.0, 0.0)


def h4_tariff():
    # slots at hours 0, 6, 12, 18; window covers the whole day
    return TariffModel({"all": list(range(1, 13))}, {"all": [0.1] * 24},
                       {"all": [20.0] * 12 + [30.0] * 12}, (0, 23))


def h4_cycle():
    return BillingCycle(2015, 7, np.array([[10.0, 10.0, 10.0, 30.0]]), 360)


def h4_battery():
    return BatterySpec(1000.0, -20.0, 20.0, 0.0, soe_ini=500.0)


def h4_grid_oracle(p_d, step=0.5):
    """Best energy + p_d * peak over a grid of energy-neutral dispatches."""
    load = np.array([10.0, 10.0, 10.0, 30.0])
    g = np.arange(-20.0, 20.0 + step / 2, step)
    p1, p2, p3 = np.meshgrid(g, g, g, indexing="ij")
    p4 = -(p1 + p2 + p3)
    P = np.stack([p1, p2, p3, p4], axis=-1).reshape(-1, 4)
    P = P[np.abs(P[:, 3]) <= 20.0]
    soe = 500.0 + np.cumsum(P * 6.0, axis=1)
    P = P[np.all((soe >= 0) & (soe <= 1000.0), axis=1)]
    net = load + P
    cost = (net * 6.0 * 0.1).sum(axis=1) + p_d * net.max(axis=1)
    k = int(np.argmin(cost))
    return cost[k], net[k].max()


@pytest.mark.parametrize("bound,p_d", [("hi", 30.0), ("lo", 20.0)])
def test_h4_water_filling(bound, p_d):
    res = optimize_cycle(h4_cycle(), h4_battery(), zero_curve(4), h4_tariff(), bound)
    ref_cost, ref_peak = h4_grid_oracle(p_d)
    assert res.objective == pytest.approx(ref_cost, rel=1e-9)
    net = res.plan.net_load(h4_cycle().days)
    assert net.max() == pytest.approx(ref_peak, abs=1e-7)
    assert net.max() == pytest.approx(15.0, abs=1e-7)
    assert res.plan.battery_power[0, 3] == pytest.approx(-15.0, abs=1e-7)
    res.plan.check(h4_battery())


def test_h4_bracket():
    t = h4_tariff()
    hi = optimize_cycle(h4_cycle(), h4_battery(), zero_curve(4), t, "hi")
    lo = optimize_cycle(h4_cycle(), h4_battery(), zero_curve(4), t, "lo")
    assert hi.verified and lo.verified
    assert lo.objective - 1e-9 <= hi.exact_cost <= hi.objective + 1e-9


def test_zero_capacity_is_baseline(tariff, curve):
    rng = np.random.default_rng(0)
    c = peaky_cycle(rng, interval_minutes=15)
    for bound in ("hi", "lo"):
        res = optimize_cycle(c, ZERO, curve, tariff, bound)
        assert np.all(res.plan.battery_power == 0)
        assert res.objective == pytest.approx(relaxed_bill(tariff, c, bound), rel=1e-9)


def test_huge_capital_means_no_dispatch(tariff):
    c = peaky_cycle(np.random.default_rng(1))
    pts = ((0.2, 3000.0), (0.5, 1000.0), (1.0, 150.0))
    bat = BatterySpec(20.0, -10.0, 10.0, 1e12, cycle_life_points=pts)
    curve = build_curve(fit_cycle_life(pts), 1e12, 10)
    res = optimize_cycle(c, bat, curve, tariff, "hi")
    assert np.abs(res.plan.battery_power).max() <= 1e-7
    assert res.degradation == pytest.approx(0.0, abs=1e-6)


def test_flat_load_flat_price_no_dispatch():
    c = BillingCycle(2015, 3, np.full((4, 24), 40.0), 60)
    bat = small_battery()
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    res = optimize_cycle(c, bat, curve, flat_tariff(), "hi")
    assert np.abs(res.plan.battery_power).max() <= 1e-7
    assert relaxed_bill(flat_tariff(), c, "hi") - res.relaxed_bill == pytest.approx(0, abs=1e-6)


def test_plan_invariants(tariff):
    rng = np.random.default_rng(3)
    bat = small_battery(capital=50.0)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    for interval in (15, 60):
        res = optimize_cycle(peaky_cycle(rng, interval_minutes=interval), bat, curve, tariff, "hi")
        res.plan.check(bat)
        assert np.abs(res.plan.battery_power).max() > 1e-3


def test_efficiency_loss_costs_more(tariff):
    rng = np.random.default_rng(4)
    c = peaky_cycle(rng)
    bat = small_battery(capital=50.0)
    lossy = BatterySpec(bat.soe_max, bat.p_min, bat.p_max, bat.capital_cost_battery,
                        cycle_life_points=bat.cycle_life_points, round_trip_efficiency=0.85)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    ideal = optimize_cycle(c, bat, curve, tariff, "hi")
    worse = optimize_cycle(c, lossy, curve, tariff, "hi")
    assert worse.objective >= ideal.objective - 1e-9
    worse.plan.check(lossy)


def spike_day(peak_hour=14, base=100.0, spike=200.0, interval=15):
    H = 1440 // interval
    d = np.full(H, base)
    per = 60 // interval
    d[peak_hour * per:(peak_hour + 1) * per] = spike
    return BillingCycle(2015, 7, d[None, :], interval)


def test_hvac_only_cuts_peak_by_v():
    hv = HvacParams(1, 5.0, 2, 10.0, candidate_start_hours=(12,))
    day = spike_day()
    res = optimize_cycle(day, ZERO, zero_curve(), flat_tariff(), "hi", hv, [(12, 13)])
    assert res.bill.peak_kw == pytest.approx(0.9 * 200.0, rel=1e-12)


def test_hvac_zero_magnitudes_pick_earliest():
    hv = HvacParams(1, 0.0, 2, 0.0, candidate_start_hours=(9, 10, 11))
    pair, _ = enumerate_hvac_windows(spike_day(), hv, ZERO, zero_curve(), flat_tariff(), "hi")
    assert pair == (9, 10)


def test_hvac_singleton():
    hv = HvacParams(2, 5.0, 3, 10.0, candidate_start_hours=(11,))
    pair, _ = enumerate_hvac_windows(spike_day(), hv, ZERO, zero_curve(), flat_tariff(), "hi")
    assert pair == (11, 13)


def test_hvac_no_admissible_pair():
    hv = HvacParams(4, 5.0, 4, 10.0, candidate_start_hours=(20,))
    with pytest.raises(ValidationError, match="admissible"):
        enumerate_hvac_windows(spike_day(), hv, ZERO, zero_curve(), flat_tariff(), "hi")


def test_hvac_three_by_three_grid(tariff):
    rng = np.random.default_rng(11)
    hours = np.arange(96) / 4
    load = 100 + 80 * np.exp(-((hours - 15.3) / 1.7) ** 2) + rng.uniform(0, 3, 96)
    day = BillingCycle(2015, 7, load[None, :], 15)
    hv = HvacParams(2, 5.0, 2, 10.0, candidate_start_hours=(9, 10, 11),
                    post_start_hours=(13, 14, 15))
    assert len(hv.window_pairs()) == 9
    pair, obj = enumerate_hvac_windows(day, hv, ZERO, zero_curve(), tariff, "hi")

    def relaxed(pre, post):
        hrs = (np.arange(96) * 15) // 60
        net = load.copy()
        net[(hrs >= pre) & (hrs < pre + 2)] *= 1.05
        net[(hrs >= post) & (hrs < post + 2)] *= 0.90
        _, energy, peak, _ = bill_naive([net.tolist()], 7, tariff)
        return energy + 41.95 * peak

    costs = {p: relaxed(*p) for p in itertools.product((9, 10, 11), (13, 14, 15))}
    best = min(costs, key=lambda p: (costs[p], p))
    assert pair == best
    assert obj == pytest.approx(costs[best], rel=1e-9)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10_000))
def test_hvac_never_increases_objective(tariff, seed):
    rng = np.random.default_rng(seed)
    c = peaky_cycle(rng, n_days=3)
    bat = small_battery(capital=200.0)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    hv = HvacParams(2, float(rng.uniform(0, 20)), 2, float(rng.uniform(0, 20)),
                    candidate_start_hours=(10, 12))
    plain, _ = assess_cycle(c, bat, curve, tariff, "hi")
    with_hvac, _ = assess_cycle(c, bat, curve, tariff, "hi", hvac=hv)
    assert with_hvac.objective <= plain.objective + 1e-9 * abs(plain.objective)


def test_choose_windows_marks_days(tariff):
    hv = HvacParams(1, 5.0, 2, 10.0, candidate_start_hours=(12,))
    day = spike_day()
    two = BillingCycle(2015, 7, np.vstack([day.days, np.full(96, 10.0)]), 15)
    w = choose_hvac_windows(two, hv, ZERO, zero_curve(), tariff, "hi")
    assert w[0] == (12, 13)
    assert w[1] is None


def test_sos2_matches_epigraph_small(tariff):
    rng = np.random.default_rng(5)
    c = peaky_cycle(rng, n_days=2, interval_minutes=120)
    bat = small_battery(capital=300.0)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery, 3)
    a = optimize_cycle(c, bat, curve, tariff, "hi")
    b = optimize_cycle(c, bat, curve, tariff, "hi", encoding="sos2")
    assert b.objective == pytest.approx(a.objective, rel=1e-6)
    assert build_cycle_problem(c, bat, curve, tariff, "hi", encoding="sos2").lp.binaries


def test_unknown_encoding(tariff, battery, curve):
    with pytest.raises(ValidationError):
        build_cycle_problem(peaky_cycle(np.random.default_rng(0), interval_minutes=15),
                            battery, curve, tariff, "hi", encoding="bogus")


def test_free_battery_saves(tariff):
    profile = office_year(2015, seed=3, n_days=59)
    bat = BatterySpec(200.0, -50.0, 50.0, 0.0)
    report = annual_assessment(profile, bat, zero_curve(), tariff)
    for lo, hi in zip(report.for_bound("lo"), report.for_bound("hi")):
        assert hi.saving >= lo.saving > 0
        assert hi.degradation == lo.degradation == 0
    assert report.annual_saving("hi") == pytest.approx(sum(c.saving for c in report.for_bound("hi")))
    for res in report.results.values():
        res.plan.check(bat)


def test_payback_examples():
    bat = BatterySpec(10, -5, 5, 3288.0, 1000.0)
    p = payback_from_totals(2144.0, 0.0, bat)
    assert p.years == pytest.approx(2.0, abs=1e-12)
    assert p.salvage_fraction == 1.0
    none = payback_from_totals(100.0, 150.0, bat)
    assert none.years is None and none.salvage_fraction is None


@given(st.floats(1, 1e4), st.floats(0, 1), st.floats(100, 1e4), st.floats(0, 1e3))
def test_payback_identities(net, share, cap_b, cap_i):
    deg = share * net
    bat = BatterySpec(10, -5, 5, cap_b, cap_i)
    p = payback_from_totals(net + deg, deg, bat)
    assert p.years * net == pytest.approx(bat.capital_cost, rel=1e-9)
    expected = 1 - p.years * deg / cap_b
    assert p.salvage_fraction == pytest.approx(min(max(expected, 0.0), 1.0), abs=1e-9)


def test_payback_from_report(tariff):
    profile = LoadProfile(datetime(2015, 1, 1), office_year(2015, seed=2, n_days=31).values)
    bat = small_battery(capital=100.0)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    report = annual_assessment(profile, bat, curve, tariff)
    pb = payback(report, bat)
    assert set(pb) == {"hi", "lo"}
    for b, p in pb.items():
        net = report.annual_saving(b) - report.annual_degradation(b)
        if p.years is not None:
            assert p.years * net == pytest.approx(bat.capital_cost, rel=1e-9)

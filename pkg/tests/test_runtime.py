import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dsmopt.core import BatterySpec, BillingCycle, slice_cycles
from dsmopt.degradation import DegradationCurve, build_curve, fit_cycle_life, zero_curve
from dsmopt.design import optimize_cycle
from dsmopt.errors import ValidationError
from dsmopt.runtime import (KdeModel, RuntimeState, ScenarioSet, fit_peak_kde, run_cycle,
                            sample_scenarios, solve_day)
from dsmopt.synthetic import office_year
from dsmopt.tariff import TariffModel, bill, relaxed_bill

from conftest import flat_tariff, peaky_cycle, small_battery


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 60))
def test_kde_integrates_to_one(seed, n):
    rng = np.random.default_rng(seed)
    kde = fit_peak_kde(rng.normal(400, 40, n))
    h = kde.bandwidth
    lo, hi = kde.samples.min() - 8 * h, kde.samples.max() + 8 * h
    mass, _ = integrate.quad(kde.pdf, lo, hi, points=sorted(kde.samples), limit=500)
    assert mass >= 0.999


def test_bandwidth_rule():
    x = np.array([1.0, 2.0, 4.0, 7.0])
    kde = fit_peak_kde(x)
    assert kde.bandwidth == pytest.approx(1.06 * x.std(ddof=1) * 4 ** -0.2)
    assert fit_peak_kde([5.0, 5.0]).bandwidth == pytest.approx(0.5 + 1e-6)


def test_single_sample_draws_concentrate():
    kde = fit_peak_kde([300.0])
    draws = kde.sample(20_000, np.random.default_rng(0))
    assert abs(draws.mean() - 300.0) < 3 * kde.bandwidth / np.sqrt(20_000) + 1e-9


@given(st.floats(10, 500), st.floats(1, 100), st.floats(0, 200))
def test_two_point_symmetry(a, gap, d):
    kde = fit_peak_kde([a, a + gap])
    mid = a + gap / 2
    assert kde.pdf(mid + d) == pytest.approx(kde.pdf(mid - d), rel=1e-9, abs=1e-300)


def test_mc_mean_within_three_se():
    rng = np.random.default_rng(1)
    kde = fit_peak_kde(rng.normal(450, 30, 31))
    draws = kde.sample(10_000, np.random.default_rng(2))
    se = np.sqrt(kde.variance / draws.size)
    assert abs(draws.mean() - kde.mean) <= 3 * se


def test_negative_draws_resampled():
    kde = KdeModel(np.array([0.5]), 2.0)
    assert np.all(kde.sample(5000, np.random.default_rng(0)) >= 0)


def test_kde_validation():
    with pytest.raises(ValidationError):
        fit_peak_kde([])
    with pytest.raises(ValidationError):
        KdeModel(np.array([1.0]), 0.0)


def test_scenarios_scale_shape():
    shape = np.array([1.0, 2.0, 4.0, 3.0])
    kde = fit_peak_kde([100.0, 120.0, 90.0])
    s = sample_scenarios(kde, 50, shape, np.random.default_rng(3))
    np.testing.assert_array_equal(s.scenarios.max(axis=1), s.peaks)
    np.testing.assert_allclose(s.scenarios / s.peaks[:, None], np.tile(shape / 4.0, (50, 1)),
                               rtol=1e-12)
    assert s.weights.sum() == pytest.approx(1.0)
    again = sample_scenarios(kde, 50, shape, np.random.default_rng(3))
    np.testing.assert_array_equal(s.scenarios, again.scenarios)


def test_concentrated_kde_scenarios():
    kde = KdeModel(np.array([80.0]), 1e-9)
    s = sample_scenarios(kde, 5, np.array([1.0, 2.0]), np.random.default_rng(0))
    np.testing.assert_allclose(s.scenarios, [[40.0, 80.0]] * 5, rtol=1e-9)


def test_horizon_takes_maximum():
    kde = fit_peak_kde(np.linspace(50, 150, 40))
    one = sample_scenarios(kde, 400, [1.0], np.random.default_rng(0)).peaks
    ten = sample_scenarios(kde, 400, [1.0], np.random.default_rng(0), horizon_days=10).peaks
    assert ten.mean() > one.mean()


def test_bad_shape_day():
    with pytest.raises(ValidationError):
        sample_scenarios(fit_peak_kde([1.0]), 3, np.zeros(4))
    with pytest.raises(ValidationError):
        sample_scenarios(fit_peak_kde([1.0]), 0, np.ones(4))


def test_identical_scenarios_match_doubled_degradation_design(tariff):
    rng = np.random.default_rng(7)
    c = peaky_cycle(rng, n_days=1, interval_minutes=15)
    flat = TariffModel({"all": list(range(1, 13))}, {"all": [0.1] * 24},
                       {"all": tariff.demand_price["summer"].tolist()})
    bat = small_battery(capital=300.0)
    curve = build_curve(fit_cycle_life(bat.cycle_life_points), bat.capital_cost_battery)
    doubled = DegradationCurve(curve.dod_x, 2 * curve.cost_y)
    today = c.days[0]
    scen = ScenarioSet(np.tile(today, (4, 1)), np.full(4, today.max()))
    dec = solve_day(RuntimeState(), today, scen, bat, curve, flat, 7, "hi")
    ref = optimize_cycle(c, bat, doubled, flat, "hi")
    assert dec.expected_objective == pytest.approx(ref.objective, rel=1e-6)


def test_no_incentive_means_no_dispatch(battery, curve):
    rng = np.random.default_rng(8)
    c = peaky_cycle(rng, n_days=1, interval_minutes=15)
    today = c.days[0]
    scale = np.array([0.9, 1.0, 1.1])
    scen = ScenarioSet(np.outer(scale, today), scale * today.max())
    state = RuntimeState(historical_peak=10 * today.max())
    dec = solve_day(state, today, scen, battery, curve, flat_tariff(), 7, "hi")
    assert np.abs(dec.power).max() <= 1e-7


def h4_tariff():
    return TariffModel({"all": list(range(1, 13))}, {"all": [0.1] * 24},
                       {"all": [20.0] * 12 + [30.0] * 12}, (0, 23))


def reachable_peaks(load, step=0.5):
    """Peaks attainable by energy-neutral dispatch of the H=4 test battery."""
    g = np.arange(-20.0, 20.0 + step / 2, step)
    p1, p2, p3 = np.meshgrid(g, g, g, indexing="ij")
    P = np.stack([p1, p2, p3, -(p1 + p2 + p3)], axis=-1).reshape(-1, 4)
    P = P[np.abs(P[:, 3]) <= 20.0]
    soe = 500.0 + np.cumsum(P * 6.0, axis=1)
    P = P[np.all((soe >= 0) & (soe <= 1000.0), axis=1)]
    return np.unique((np.asarray(load) + P).max(axis=1))


@pytest.mark.parametrize("hist", [0.0, 16.0, 40.0])
def test_two_scenario_grid_oracle(hist):
    bat = BatterySpec(1000.0, -20.0, 20.0, 0.0, soe_ini=500.0)
    t = h4_tariff()
    today = np.array([10.0, 10.0, 10.0, 30.0])
    scen = np.array([[10.0, 10.0, 10.0, 50.0], [10.0, 10.0, 10.0, 20.0]])
    dec = solve_day(RuntimeState(historical_peak=hist), today, ScenarioSet(scen, scen.max(1)),
                    bat, zero_curve(4), t, 7, "hi", interval_minutes=360)
    energy = today.sum() * 6.0 * 0.1  # flat price, energy-neutral dispatch
    pk_today = reachable_peaks(today)
    pk_s = [reachable_peaks(s) for s in scen]
    best = np.inf
    for pt in pk_today:
        recourse = [np.min(30.0 * np.maximum(max(hist, pt), p)) for p in pk_s]
        best = min(best, energy + 0.5 * sum(recourse))
    assert dec.expected_objective == pytest.approx(best, rel=1e-9)


@pytest.fixture(scope="module")
def july():
    return slice_cycles(office_year(2015, seed=5, n_days=212))[6]


def test_zero_capacity_run_is_baseline(july, tariff):
    bat = BatterySpec(0.0, 0.0, 0.0, 0.0)
    kde = fit_peak_kde(july.days.max(axis=1))
    res = run_cycle(july, kde, july.days[0], bat, zero_curve(), tariff, "hi", n_scenarios=3)
    assert res.bill.total == bill(tariff, july).total
    assert res.relaxed_bill == relaxed_bill(tariff, july, "hi")


def test_trace_and_invariants(july, tariff, battery, curve):
    kde = fit_peak_kde(july.days.max(axis=1))
    shape = july.days[int(np.argmax(july.days.max(axis=1)))]
    res = run_cycle(july, kde, shape, battery, curve, tariff, "hi", n_scenarios=5, seed=4)
    peaks = [s.historical_peak for s in res.trace]
    assert peaks[0] == 0.0
    assert np.all(np.diff(peaks) >= 0)
    net = res.plan.net_load(july.days)
    assert peaks[-1] == pytest.approx(net.max())
    assert res.bill.peak_kw == pytest.approx(net.max())
    res.plan.check(battery)
    again = run_cycle(july, kde, shape, battery, curve, tariff, "hi", n_scenarios=5, seed=4)
    np.testing.assert_array_equal(res.plan.battery_power, again.plan.battery_power)
    design = optimize_cycle(july, battery, curve, tariff, "hi")
    base = relaxed_bill(tariff, july, "hi")
    runtime_net = base - res.relaxed_bill - res.degradation
    design_net = base - design.relaxed_bill - design.degradation
    assert runtime_net >= -1e-6
    assert runtime_net <= design_net + 1e-6 * base


def test_future_days_do_not_leak(july, tariff, battery, curve):
    k = 10
    altered = july.days.copy()
    altered[k + 1:] *= 1.3
    other = BillingCycle(july.year, july.month, altered, july.interval_minutes)
    kde = fit_peak_kde(july.days.max(axis=1))
    shape = july.days[0]
    a = run_cycle(july, kde, shape, battery, curve, tariff, "lo", n_scenarios=4, seed=1)
    b = run_cycle(other, kde, shape, battery, curve, tariff, "lo", n_scenarios=4, seed=1)
    np.testing.assert_array_equal(a.plan.battery_power[:k + 1], b.plan.battery_power[:k + 1])


def test_pinned_scenarios_track_design(july, tariff, battery, curve):
    def truth(i, remaining):
        future = july.days[i + 1:]
        day = future[int(np.argmax(future.max(axis=1)))]
        return ScenarioSet(day[None, :], [day.max()])

    design = optimize_cycle(july, battery, curve, tariff, "hi")
    res = run_cycle(july, None, None, battery, curve, tariff, "hi", scenario_source=truth)
    assert res.relaxed_bill == pytest.approx(design.relaxed_bill, rel=0.02)
    base = relaxed_bill(tariff, july, "hi")
    ratio = (base - res.relaxed_bill - res.degradation) / (base - design.relaxed_bill
                                                          - design.degradation)
    assert ratio >= 0.98


def test_forecast_noise_is_seeded(july, tariff, battery, curve):
    kde = fit_peak_kde(july.days.max(axis=1))
    runs = [run_cycle(july, kde, july.days[0], battery, curve, tariff, "hi", n_scenarios=2,
                      seed=9, forecast_noise=0.05) for _ in range(2)]
    np.testing.assert_array_equal(runs[0].plan.battery_power, runs[1].plan.battery_power)
    runs[0].plan.check(battery)


def test_wrong_forecast_length(battery, curve, tariff):
    with pytest.raises(ValidationError):
        solve_day(RuntimeState(), np.ones(10), ScenarioSet.empty(96), battery, curve, tariff, 7, "hi")

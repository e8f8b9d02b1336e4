"""Compiled versus pure-Python simplex kernel.

Times the dense solver on random boxed LPs and on one-day battery
dispatch LPs, once per kernel, and checks both agree.

    python benchmarks/bench_simplex.py --repeat 3
"""

import argparse
import time

import numpy as np

from dsmopt.core import BillingCycle
from dsmopt.degradation import build_curve, fit_cycle_life
from dsmopt.design import build_cycle_problem
from dsmopt.io import load_battery, load_tariff, sample_path
from dsmopt.lp import LinearProgram, _simplex_py, dense_simplex
from dsmopt.lp import simplex as simplex_mod


def random_lps(n_problems, n, m, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_problems):
        A = rng.normal(size=(m, n))
        x0 = rng.uniform(0, 1, n)
        out.append(LinearProgram(rng.normal(size=n), A, A @ x0 + rng.uniform(0, 1, m),
                                 lo=np.zeros(n), hi=np.ones(n) * 2))
    return out


def battery_day_lps(interval, days=1):
    tariff = load_tariff(sample_path("tariff_nyc_synthetic.yaml"))
    battery, curve = load_battery(sample_path("battery_10kwh.yaml"))
    H = 1440 // interval
    hours = np.arange(H) * interval / 60
    load = 300 + 150 * np.exp(-((hours - 15) / 2.5) ** 2)
    cycle = BillingCycle(2015, 7, np.tile(load, (days, 1)), interval)
    return [build_cycle_problem(cycle, battery, curve, tariff, b).lp for b in ("hi", "lo")]


def run(kernel, problems, repeat):
    simplex_mod._kernel = kernel
    best, objs = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        sols = [dense_simplex(p) for p in problems]
        best = min(best, time.perf_counter() - t0)
        objs = [s.objective_value for s in sols]
    return best, np.array(objs, dtype=float)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    try:
        from dsmopt.lp import _simplex_ext
    except ImportError:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    suites = {
        "random 20x40 (x50)": random_lps(50, 40, 20, args.seed),
        "random 60x120 (x10)": random_lps(10, 120, 60, args.seed),
        "battery day, 1 h slots": battery_day_lps(60),
        "battery day, 30 min slots": battery_day_lps(30),
    }
    print(f"{'suite':28s} {'python s':>10s} {'compiled s':>11s} {'speedup':>8s}")
    original = simplex_mod._kernel
    try:
        for name, probs in suites.items():
            t_py, o_py = run(_simplex_py, probs, args.repeat)
            t_c, o_c = run(_simplex_ext, probs, args.repeat)
            assert np.allclose(o_py, o_c, rtol=1e-9, atol=1e-9), name
            print(f"{name:28s} {t_py:10.4f} {t_c:11.4f} {t_py / t_c:7.1f}x")
    finally:
        simplex_mod._kernel = original


if __name__ == "__main__":
    main()

"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Monte Carlo criteria run at desk scale with the documented master seed
``lorenzpp.streams.DEFAULT_SEED``.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from lorenzpp.harness import ExperimentSpec, get_builtin, run_experiment
from lorenzpp.distributions import UnitExponential, Weibull, sample_iid
from lorenzpp.lorenz import generalized_lpp, lpp_linear, lpp_step, pp_plot
from lorenzpp.special import analytic_lpp_weibull_exp, lambert_w_minus1
from lorenzpp.statistics import t_inf, t_one, tp_norm
from lorenzpp.streams import stream

SEED = 20240229


def desk(name, runs, reps, n, **changes):
    spec = get_builtin(name).scaled(mc_runs=runs, replicates=reps, n_list=(n,))
    return replace(spec, **changes)


# --- 1. step vs linear LPP ------------------------------------------------------


def _linear_step_gaps(grid_of):
    rng = stream(SEED, 1)
    worst_ratio, violations = 0.0, 0
    for _ in range(1000):
        n, m = rng.integers(1, 201, 2)
        x, y = rng.exponential(size=n), rng.exponential(size=m)
        p = grid_of(int(n))
        gap = np.max(np.abs(lpp_linear(x, y, p) - lpp_step(x, y)(p)))
        worst_ratio = max(worst_ratio, gap * m)
        violations += gap > 1.0 / m
    return violations, worst_ratio


def test_c1_linear_step_within_one_over_m(report):
    violations, worst = _linear_step_gaps(lambda n: np.arange(1, 10 * n + 1) / (10 * n))
    ok = report(
        "C1 sup |lpp_linear - lpp_step| <= 1/m on a 10n grid",
        violations == 0,
        f"{violations}/1000 pairs exceed 1/m, worst gap = {worst:.2f}/m",
    )
    assert ok


def test_c1_companion_bound_holds_at_nodes(report):
    violations, worst = _linear_step_gaps(lambda n: np.arange(1, n + 1) / n)
    ok = report("C1 companion: bound at the nodes k/n", violations == 0, f"worst gap = {worst:.5f}/m")
    assert ok


# --- 2. brute-force oracle ------------------------------------------------------


def _materialised_lpp(x, y, u):
    """Both step curves evaluated pointwise, straight from their definitions."""
    xs, ys = sorted(x), sorted(y)
    n, m = len(xs), len(ys)
    s = np.cumsum(xs) / n
    t = np.cumsum(ys) / m
    out = np.empty(u.size)
    for i, ui in enumerate(u):
        k = min(max(math.ceil(ui * n - 1e-9), 1), n)
        level = s[k - 1]
        out[i] = sum(1 for tj in t if tj <= level) / m
    return out


def test_c2_bruteforce_oracle(report):
    rng = stream(SEED, 2)
    worst_inf = worst_one_plain = worst_one_refined = 0.0
    for _ in range(40):
        n = int(rng.integers(1, 13))
        x, y = rng.lognormal(size=n), rng.lognormal(size=n)
        curve = lpp_step(x, y)

        # 10^4 points exactly; midpoints of the fine cells
        u = (np.arange(10_000) + 0.5) / 10_000
        dev = u - _materialised_lpp(x, y, u)
        worst_one_plain = max(worst_one_plain, abs(np.mean(np.maximum(dev, 0)) - t_one(curve)))

        # a grid of ~10^4 points that contains every node and every k/n midpoint
        big = 2 * n * math.ceil(5000 / n)
        nodes = np.arange(1, big + 1) / big
        dev_nodes = nodes - _materialised_lpp(x, y, nodes)
        worst_inf = max(worst_inf, abs(max(0.0, dev_nodes.max()) - t_inf(curve)))
        cells = (np.arange(big) + 0.5) / big
        dev_cells = cells - _materialised_lpp(x, y, cells)
        worst_one_refined = max(worst_one_refined, abs(np.mean(np.maximum(dev_cells, 0)) - t_one(curve)))

    ok = worst_inf <= 1e-12 and worst_one_plain <= 1e-3 and worst_one_refined <= 1e-12
    report(
        "C2 brute-force oracle",
        ok,
        f"T_inf err {worst_inf:.1e}, T_1 err {worst_one_plain:.1e} (1e4 grid) / {worst_one_refined:.1e} (refined)",
    )
    assert ok


# --- 3-5, 9. desk-scale rejection rates ------------------------------------------


@pytest.mark.slow
def test_c3_size_weibull(report):
    spec = desk("table1", 200, 200, 500, stats=("tinf", "t1"))
    table = run_experiment(spec)
    tinf, t1 = table.cell(500, "forward", "tinf"), table.cell(500, "forward", "t1")
    ok = 0.04 <= tinf <= 0.17 and 0.04 <= t1 <= 0.17
    report("C3 size under W(1,1) = W(1,1), n=500", ok, f"T_inf {tinf:.3f}, T_1 {t1:.3f}, band [0.04, 0.17]")
    assert ok


@pytest.mark.slow
def test_c4_power_clear_dominance(report):
    spec = desk("table4", 100, 200, 500, direction="reverse")
    table = run_experiment(spec)
    tinf = table.cell(500, "reverse", "tinf")
    t1 = table.cell(500, "reverse", "t1")
    ksb3 = table.cell(500, "reverse", "ksb3:2")
    ok = tinf >= 0.90 and t1 >= 0.90 and 0.35 <= ksb3 <= 0.65
    report("C4 reverse power, W(1.3) vs W(1,1), n=500", ok, f"T_inf {tinf:.2f}, T_1 {t1:.2f}, KSB3 {ksb3:.2f}")
    assert ok


@pytest.mark.slow
def test_c5_hard_case_contrast(report):
    spec = desk("table6", 100, 200, 500)
    table = run_experiment(spec)
    f_t1 = table.cell(500, "forward", "t1")
    f_ksb3 = table.cell(500, "forward", "ksb3:2")
    r_tinf = table.cell(500, "reverse", "tinf")
    r_ksb3 = table.cell(500, "reverse", "ksb3:2")
    ok = f_t1 <= 0.05 and f_ksb3 >= 0.75 and r_tinf >= 0.95 and r_ksb3 <= 0.10
    report(
        "C5 SM(1.5,1.8) vs SM(1,1.8), n=500",
        ok,
        f"forward T_1 {f_t1:.2f}, KSB3 {f_ksb3:.2f}; reverse T_inf {r_tinf:.2f}, KSB3 {r_ksb3:.2f}",
    )
    assert ok


@pytest.mark.slow
def test_c9_paired_scheme_effect(report):
    paired = run_experiment(desk("table11", 100, 200, 200, direction="reverse", stats=("tinf",)))
    indep = run_experiment(desk("table6", 100, 200, 200, direction="reverse", stats=("tinf",)))
    rp, ri = paired.cell(200, "reverse", "tinf"), indep.cell(200, "reverse", "tinf")
    ok = rp >= ri - 0.05
    report("C9 paired rho=0.75 vs independent, reverse T_inf, n=200", ok, f"paired {rp:.2f}, independent {ri:.2f}")
    assert ok


# --- 6. P-P plot limit -------------------------------------------------------------


def test_c6_large_theta_equals_pp_plot(report):
    rng = stream(SEED, 6)
    mismatched = 0
    for _ in range(500):
        n, m = rng.integers(1, 51, 2)
        x, y = rng.uniform(size=n), rng.uniform(size=m)
        top = max(x.max(), y.max())
        x, y = x / top, y / top
        mismatched += generalized_lpp(x, y, 2.0**10) != pp_plot(x, y)
    ok = report("C6 theta = 2^10 LPP equals P-P plot at every node", mismatched == 0, f"{mismatched}/500 pairs differ")
    assert ok


# --- 7. analytic oracle ----------------------------------------------------------------


def test_c7_analytic_convergence(report):
    rng = stream(SEED, 7)
    x = sample_iid(Weibull(2.0, 1.5), 2000, rng)
    y = sample_iid(UnitExponential(), 2000, rng)
    curve = lpp_step(x, y)
    dist = float(np.max(np.abs(curve.values - analytic_lpp_weibull_exp(2.0, 1.5, curve.grid))))

    grid = -np.exp(-1.0) * np.geomspace(1.0, 1e-15, 2000)[1:]
    residual = max(abs(w * math.exp(w) - v) for v in grid for w in [lambert_w_minus1(v)])
    ok = dist < 0.05 and residual < 1e-12
    report("C7 analytic oracle, W(2,1.5) vs Exp(1), n=m=2000", ok, f"sup node distance {dist:.4f}, W residual {residual:.1e}")
    assert ok


# --- 8. property suite --------------------------------------------------------------------


def _random_step_deviation(rng):
    n, m = rng.integers(1, 60, 2)
    curve = lpp_step(rng.exponential(size=n), rng.exponential(size=m))
    return curve.grid - curve.values


def test_c8_property_suite(report):
    rng = stream(SEED, 8)
    ps = [1.0, 2.0, 3.5, math.inf]
    failures = 0
    for _ in range(1000):
        v1 = _random_step_deviation(rng)
        n = v1.size
        v2 = v1 + rng.normal(scale=0.3, size=n)
        neg = -np.abs(rng.normal(size=n))
        c = float(rng.uniform(0.01, 100.0))
        for p in ps:
            T = lambda v: tp_norm(v, p)
            failures += T(np.zeros(n)) != 0.0
            failures += T(v2) > T(v2 - neg) + 1e-12
            failures += bool(np.any(v1 > 0)) and not T(v1) > 0
            failures += abs(T(v1) - T(v2)) > np.max(np.abs(v1 - v2)) + 1e-12
            failures += not math.isclose(T(c * v1), c * T(v1), rel_tol=1e-12, abs_tol=1e-15)
            for beta in (0.25, 0.5, 0.75):
                failures += T(beta * v2 + (1 - beta) * v1) > beta * T(v2) + (1 - beta) * T(v1) + 1e-12
        for lo, hi in zip(ps, ps[1:]):
            failures += tp_norm(v1, hi) < tp_norm(v1, lo) - 1e-12

    scale_failures = 0
    for _ in range(200):
        n, m = rng.integers(1, 100, 2)
        x, y = rng.lognormal(size=n), rng.lognormal(size=m)
        base = lpp_step(x, y)
        for c in (1e-3, 1.0, 1e3):
            scale_failures += lpp_step(x * c, y * c) != base

    spec = ExperimentSpec(
        "determinism", Weibull(1.2, 0.94), UnitExponential(), n_list=(50, 100), mc_runs=8, replicates=30
    )
    same = run_experiment(spec, workers=1).to_csv() == run_experiment(spec, workers=4).to_csv()

    ok = failures == 0 and scale_failures == 0 and same
    report(
        "C8 property suite",
        ok,
        f"{failures} property violations on 1000 grid functions, {scale_failures} scale mismatches, "
        f"worker-independent CSV: {same}",
    )
    assert ok

"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines bypass capture) or
directly with ``python3 tests/test_acceptance.py``.
"""
import math
import sys

import numpy as np
import pytest
from scipy.optimize import brentq

from robustprice.bundling import BundleQuery, bundle_price, bundle_threshold
from robustprice.guarantees import guarantee_ratio, monotonicity_checks
from robustprice.market import MarketInfo, max_sigma
from robustprice.oracle import random_market, sample_feasible_distribution
from robustprice.pricing import (PriceRegion, cantelli_revenue, g_threshold, h_threshold,
                                 high_price, low_price, mean_support_revenue, mid_price,
                                 optimal_price, sigma_star, switch_r, switch_t,
                                 three_point_revenue, worst_case_revenue)
from robustprice.queueing import (QueueMarket, damped_fixed_point, equilibrium, gamma_max,
                                  optimal_queue_price, p_max)
from robustprice.verification import (TAIL_TOL, check_strict_weak, check_three_prices,
                                      tail_errors)

_capture = None


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(number, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2} {name}: {detail}"
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line


def precise(m):
    return MarketInfo(m.mu, m.sigma_hi, m.sigma_hi, m.beta)


# 1 -----------------------------------------------------------------------

def test_tail_bound_tightness():
    coarse = np.array([e for e, _, _ in tail_errors(500, seed=101, n_atoms=2001)])
    fine = np.array([e for e, _, _ in tail_errors(500, seed=101, n_atoms=8001)])
    ok = (coarse.max() <= TAIL_TOL and fine.max() <= 0.5 * coarse.max()
          and fine.mean() <= 0.5 * coarse.mean())
    report(1, "tail vs LP", ok,
           f"max err {coarse.max():.3g} at 2001 atoms, {fine.max():.3g} at 8001 "
           f"(mean {coarse.mean():.3g} -> {fine.mean():.3g})")


# 2 -----------------------------------------------------------------------

def test_three_prices():
    res = check_three_prices(1000, seed=202, n_prices=100_001)
    report(2, "three prices", res.passed and res.trials == 1000,
           f"1000 markets, worst excess {res.worst:.3g} (0 = within one step, revenue >= grid max - 1e-6)")


# 3 -----------------------------------------------------------------------

def test_threshold_closed_forms():
    mu, beta = 0.5, 1.0
    pm_rev = mean_support_revenue(mid_price(mu, beta), mu, beta)

    def low_minus_mid(s):
        return cantelli_revenue(low_price(mu, s), mu, s) - pm_rev

    root = brentq(low_minus_mid, 1e-6, max_sigma(mu, beta), xtol=1e-15, rtol=1e-15)
    closed = math.sqrt(32 / 27 * (beta - mu) * (math.sqrt(beta * (beta - mu)) - (beta - mu)))
    err_f = abs(root - closed)

    g = g_threshold(mu, beta)
    err_g = abs(three_point_revenue(high_price(mu, g, beta), mu, g, beta) - pm_rev)
    err_h = 0.0
    for s_hi in np.linspace(0.05, closed, 20):
        h = h_threshold(s_hi, mu, beta)
        if h > 0:
            err_h = max(err_h, abs(three_point_revenue(high_price(mu, h, beta), mu, h, beta)
                                   - cantelli_revenue(low_price(mu, s_hi), mu, s_hi)))
    ok = max(err_f, err_g, err_h) <= 1e-9
    report(3, "threshold closed forms", ok,
           f"f err {err_f:.2g}, g err {err_g:.2g}, h err {err_h:.2g}")


# 4 -----------------------------------------------------------------------

def test_low_high_switch():
    mu, beta = 0.5, 1.0
    s_star = sigma_star(mu, beta)
    sigmas = np.linspace(0.0, 0.5, 402)[1:-1]
    decisions = [optimal_price(MarketInfo(mu, s, s, beta)) for s in sigmas]
    regions = [d.region for d in decisions]
    below = all(r is PriceRegion.LOW for s, r in zip(sigmas, regions) if s < s_star)
    above = all(r is PriceRegion.HIGH for s, r in zip(sigmas, regions) if s > s_star)
    switches = [k for k in range(1, len(regions)) if regions[k] is not regions[k - 1]]
    jump = decisions[switches[0]].price - decisions[switches[0] - 1].price if switches else 0.0
    ok = below and above and len(switches) == 1 and jump > 0
    report(4, "low-high switch", ok,
           f"sigma* {s_star:.10f}, {len(switches)} switch(es), price jump {jump:.4f}")


# 5 -----------------------------------------------------------------------

TABLE = [(3 / 8, 2.72, 2.61), (23 / 48, 2.74, 2.68), (7 / 12, 2.81, 2.78),
         (11 / 16, 2.91, 2.90), (19 / 24, 3.07, 3.06), (43 / 48, 3.26, 3.24)]


def test_switch_table():
    ok, worst = True, 0.0
    for c, r_tab, t_tab in TABLE:
        r, t = switch_r(c), switch_t(c + 5 / 48)
        ok &= round(r, 2) == r_tab and round(t, 2) == t_tab and r > t
        worst = max(worst, abs(r - r_tab), abs(t - t_tab))
    report(5, "switch table", ok, f"six rows, max |value - table| {worst:.4f}")


# 6 -----------------------------------------------------------------------

def test_guarantee_ratios():
    rng = np.random.default_rng(606)
    identity = 0.0
    for _ in range(200):
        m = random_market(rng)
        identity = max(identity, abs(guarantee_ratio(m).ratio * m.mu
                                     - worst_case_revenue(m, optimal_price(m).price)))

    slack = math.inf
    rng = np.random.default_rng(607)
    for k in range(50):
        m = random_market(rng)
        dist = sample_feasible_distribution(m, seed=6000 + k)
        price = optimal_price(m).price
        _, opt = dist.optimal_revenue()
        slack = min(slack, dist.revenue(price) - guarantee_ratio(m).ratio * opt)

    sigmas = np.linspace(0.0, 0.5, 202)[1:-1]
    ratios = np.array([guarantee_ratio(MarketInfo(0.5, s, s, 1.0)).ratio for s in sigmas])
    k = int(np.argmin(ratios))
    u_shape = bool(np.all(np.diff(ratios[:k + 1]) <= 1e-12) and np.all(np.diff(ratios[k:]) >= -1e-12))
    ok = identity <= 1e-10 and slack >= -1e-6 and u_shape and 0 < k < len(ratios) - 1
    report(6, "guarantee ratios", ok,
           f"identity err {identity:.2g}, min guarantee slack {slack:.3g}, "
           f"U-shape minimum at sigma {sigmas[k]:.4f}")


# 7 -----------------------------------------------------------------------

def test_monotonicity_suite():
    checks = monotonicity_checks(0.5, 1.0, n=100)
    failed = [name for name, ok in checks.items() if not ok]
    report(7, "monotonicity", len(checks) == 6 and not failed,
           f"{len(checks) - len(failed)}/6 sweeps pass" + (f"; failed {failed}" if failed else ""))


# 8 -----------------------------------------------------------------------

def test_bundling():
    m_star = bundle_threshold(MarketInfo(0.5, 0.4, 0.4, 1.0))
    rng = np.random.default_rng(808)
    misses, checked = 0, 0
    for _ in range(200):
        m = precise(random_market(rng))
        start = math.ceil(bundle_threshold(m))
        for size in [*range(max(start, 1), max(start, 1) + 10), 10 * start + 1, 1000 * start + 1]:
            checked += 1
            misses += bundle_price(BundleQuery(m, size)).decision.region is not PriceRegion.LOW
    ok = abs(m_star - 2.7111) <= 1e-3 and misses == 0
    report(8, "bundling", ok, f"m* {m_star:.6f}; {misses} non-low decisions in {checked} bundle sizes")


# 9 -----------------------------------------------------------------------

def test_queueing():
    rng = np.random.default_rng(909)
    residual, disagree = 0.0, 0.0
    for _ in range(300):
        m = random_market(rng)
        q = QueueMarket(m, lam=rng.uniform(0.1, 50), theta=rng.uniform(0.1, 10),
                        hold_cost=rng.uniform(0.0, 5.0))
        p = m.beta * rng.uniform(1e-3, 1.0)
        eq = equilibrium(q, p)
        residual = max(residual, abs(eq.residual))
        disagree = max(disagree, abs(damped_fixed_point(q, p) - eq.gamma_star))
    ok_a = residual <= 1e-10 and disagree <= 1e-8

    def fig6(s):
        return QueueMarket(MarketInfo(2.0, s, s, 10.0), lam=5.0, theta=2.0, hold_cost=1.0)

    mode_lo, mode_hi = optimal_queue_price(fig6(2.0)).mode, optimal_queue_price(fig6(2.6)).mode
    ok_b = mode_lo == "low" and mode_hi == "high"

    mu, beta = 1.0, 5.0
    ms = MarketInfo(mu, 0.0, max_sigma(mu, beta), beta)
    base = QueueMarket(ms, lam=1e7, theta=1.0, hold_cost=0.1)
    prices = np.linspace(0.0, mu, 1_000_001)[1:-1]
    gmax = np.array([gamma_max(base, p) for p in prices[::1000]])
    grid_pmax = prices[int(np.argmax(prices * (base.theta - base.theta * base.hold_cost
                                               / (base.theta * mu + base.hold_cost - base.theta * prices))))]
    gap_gamma = max(abs(equilibrium(base, p).gamma_star - g) for p, g in zip(prices[::1000], gmax))
    best = optimal_queue_price(base).price
    ok_c = abs(grid_pmax - p_max(base)) <= 1e-5 and gap_gamma <= 1e-5 and abs(best - p_max(base)) <= 1e-5

    report(9, "queueing", ok_a and ok_b and ok_c,
           f"(a) max residual {residual:.2g}, damped gap {disagree:.2g}; "
           f"(b) modes {mode_lo}->{mode_hi}; (c) p_max {p_max(base):.6f} vs grid {grid_pmax:.6f} "
           f"vs optimum {best:.6f}, gamma gap {gap_gamma:.2g}")


# 10 ----------------------------------------------------------------------

def test_strict_weak_equivalence():
    res = check_strict_weak(100, seed=1010)
    report(10, "strict vs weak", res.passed and res.trials == 100,
           f"worst |weak - strict| {res.worst:.3g} over 100 instances (tol {res.tol})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

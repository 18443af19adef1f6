"""Randomized agreement checks between closed forms and brute-force references.

Each check draws seeded random markets, compares the library against the
LP / grid oracles and keeps the worst instance seen.  ``robustprice verify``
runs them all.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .guarantees import guarantee_ratio
from .market import MarketInfo
from .oracle import (GridSpec, grid_argmax_revenue, lp_worst_tail, random_market,
                     random_price, snap_price)
from .pricing import optimal_price, worst_case_revenue
from .tailbound import strict_vs_weak_equivalence, tail_value

TAIL_TOL = 2e-3
REVENUE_TOL = 1e-6
RATIO_TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    tol: float
    trials: int = 0
    worst: float = 0.0
    worst_instance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def record(self, err: float, instance: dict):
        self.trials += 1
        if self.trials == 1 or err > self.worst:
            self.worst, self.worst_instance = float(err), instance

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "trials": self.trials,
                "worst_error": self.worst, "tol": self.tol,
                "worst_instance": self.worst_instance}


def tail_errors(trials: int, seed: int, n_atoms: int = 2001) -> list[tuple[float, MarketInfo, float]]:
    """``(|closed form - LP|, market, price)`` for random markets and prices.

    The LP works on a support lattice and snaps the price to it; the closed
    form is evaluated at the same snapped price.
    """
    rng = np.random.default_rng(seed)
    grid = GridSpec(n_atoms=n_atoms)
    out = []
    for _ in range(trials):
        m = random_market(rng)
        p = snap_price(m, random_price(m, rng), grid)
        err = abs(tail_value(m, p) - lp_worst_tail(m, p, grid))
        out.append((err, m, p))
    return out


def check_tail_tightness(trials: int, seed: int, n_atoms: int = 2001) -> CheckResult:
    res = CheckResult("tail_vs_lp", TAIL_TOL)
    for err, m, p in tail_errors(trials, seed, n_atoms):
        res.record(err, {**m.to_dict(), "p": p})
    return res


def check_three_prices(trials: int, seed: int, n_prices: int = 100_001) -> CheckResult:
    """Grid argmax sits within one step of a candidate, and the chosen candidate is not beaten.

    The error is measured in grid steps beyond the first plus revenue
    shortfall over its tolerance, so ``worst <= 0`` means every instance passed.
    """
    rng = np.random.default_rng(seed)
    grid = GridSpec(n_prices=n_prices)
    res = CheckResult("three_prices", 0.0)
    for _ in range(trials):
        m = random_market(rng)
        step = m.beta / (n_prices - 1)
        p_grid, r_grid = grid_argmax_revenue(m, grid)
        dec = optimal_price(m)
        dist = min(abs(p_grid - c) for c in dec.candidates.as_tuple())
        err = max(dist / step - 1.0 - 1e-9, (r_grid - dec.worst_case_revenue) - REVENUE_TOL, 0.0)
        res.record(err, {**m.to_dict(), "grid_price": p_grid, "price": dec.price})
    return res


def check_ratio_identity(trials: int, seed: int) -> CheckResult:
    rng = np.random.default_rng(seed)
    res = CheckResult("ratio_identity", RATIO_TOL)
    for _ in range(trials):
        m = random_market(rng)
        dec = optimal_price(m)
        rep = guarantee_ratio(m)
        err = abs(rep.ratio * m.mu - worst_case_revenue(m, dec.price))
        res.record(err, {**m.to_dict(), "ratio": rep.ratio})
    return res


def check_strict_weak(trials: int, seed: int, n_atoms: int = 2001) -> CheckResult:
    rng = np.random.default_rng(seed)
    grid = GridSpec(n_atoms=n_atoms)
    res = CheckResult("strict_vs_weak", TAIL_TOL)
    for _ in range(trials):
        m = random_market(rng)
        p = random_price(m, rng)
        weak, strict = strict_vs_weak_equivalence(m, p, grid)
        res.record(abs(weak - strict), {**m.to_dict(), "p": p})
    return res


def run_all(trials: int = 100, seed: int = 0) -> list[CheckResult]:
    return [
        check_tail_tightness(trials, seed),
        check_three_prices(trials, seed + 1),
        check_ratio_identity(trials, seed + 2),
        check_strict_weak(trials, seed + 3),
    ]

"""Robust pricing of an unobservable single-server queue.

Customers arrive at rate ``lam`` and join when their valuation exceeds the
price plus the expected waiting cost ``hold_cost * W(gamma)``, where
``gamma`` is the rate of customers who join.  Against the worst valuation
distribution the equilibrium joining rate solves

    gamma = lam * worst_case_tail(p + hold_cost * W(gamma))

whose right side is non-increasing in ``gamma``; the root is unique and is
found by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DomainError, PriceOutOfRange, RateOutOfRange
from .market import MarketInfo, breakpoints
from .tailbound import Region, classify_price, tail_value


def waiting_time(gamma: float, theta: float) -> float:
    """Expected M/M/1 wait at arrival rate ``gamma`` and service rate ``theta``."""
    if gamma < 0 or gamma >= theta:
        raise RateOutOfRange(f"need 0 <= gamma < theta, got gamma={gamma}, theta={theta}")
    return gamma / (theta * (theta - gamma))


@dataclass(frozen=True)
class QueueMarket:
    market: MarketInfo
    lam: float
    theta: float
    hold_cost: float
    wait: Callable[[float, float], float] = field(default=waiting_time, compare=False)

    def __post_init__(self):
        if not (self.lam > 0 and self.theta > 0 and self.hold_cost >= 0):
            raise DomainError(
                f"need lam > 0, theta > 0, hold_cost >= 0; got "
                f"{self.lam}, {self.theta}, {self.hold_cost}")

    def replace(self, **changes) -> "QueueMarket":
        fields = dict(market=self.market, lam=self.lam, theta=self.theta,
                      hold_cost=self.hold_cost, wait=self.wait)
        fields.update(changes)
        return QueueMarket(**fields)


@dataclass(frozen=True)
class Equilibrium:
    price: float
    gamma_star: float
    residual: float

    @property
    def revenue(self) -> float:
        return self.price * self.gamma_star

    def to_dict(self) -> dict:
        return {"p": self.price, "gamma_star": self.gamma_star,
                "revenue": self.revenue, "residual": self.residual}


def _joining_rate(q: QueueMarket, p: float, gamma: float, bp=None) -> float:
    # lam times the worst-case probability of joining at congestion gamma
    threshold = p + q.hold_cost * q.wait(gamma, q.theta) if q.hold_cost else p
    return q.lam * tail_value(q.market, threshold, bp)


def _gamma_cap(q: QueueMarket) -> float:
    if q.hold_cost == 0:
        return q.lam  # waiting is free, so nothing stops gamma reaching theta
    # the largest rate with a finite M/M/1 wait
    return min(q.lam, math.nextafter(q.theta, 0.0))


def equilibrium(q: QueueMarket, p: float) -> Equilibrium:
    if not p > 0:
        raise PriceOutOfRange(f"price must be positive, got {p}")
    bp = breakpoints(q.market)
    if q.hold_cost == 0:
        # no congestion feedback
        return Equilibrium(p, _joining_rate(q, p, 0.0, bp), 0.0)

    def excess(gamma):
        return gamma - _joining_rate(q, p, gamma, bp)

    if excess(0.0) >= 0:
        gamma = 0.0
    else:
        cap = _gamma_cap(q)
        if excess(cap) <= 0:
            gamma = cap
        else:
            gamma = _bisect_increasing(excess, 0.0, cap)
    return Equilibrium(p, gamma, excess(gamma))


def _bisect_increasing(fn, lo: float, hi: float) -> float:
    """Root of an increasing ``fn`` with ``fn(lo) < 0 < fn(hi)``.

    Bisects down to adjacent floats and returns the endpoint with the smaller
    residual; near the service-rate singularity the map is steep enough that
    the midpoint alone can miss a 1e-10 residual.
    """
    f_lo, f_hi = fn(lo), fn(hi)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = fn(mid)
        if f_mid == 0:
            return mid
        if f_mid < 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return lo if abs(f_lo) <= abs(f_hi) else hi


def damped_fixed_point(q: QueueMarket, p: float, damping: float = 0.5,
                       max_iter: int = 10_000, tol: float = 1e-15,
                       adaptive: bool = True) -> float:
    """Equilibrium rate by damped iteration ``g <- g + d * (lam * tail(...) - g)``.

    Independent of :func:`equilibrium`; used to cross-check it.  The joining
    map is decreasing, so once its slope falls below ``1 - 2/d`` a fixed
    damping overshoots and oscillates forever.  With ``adaptive`` each step
    starts from ``damping`` and is halved for as long as that shrinks the
    fixed-point defect.  For a locally linear map the accepted step cuts the
    defect by at least a factor of three, so convergence is geometric even
    right next to the service-rate singularity.
    """
    bp = breakpoints(q.market)
    cap = _gamma_cap(q)

    def defect(g):
        return _joining_rate(q, p, g, bp) - g

    gamma = 0.0
    r = defect(gamma)
    for _ in range(max_iter):
        if abs(r) <= tol:
            break
        d = damping
        new = min(gamma + d * r, cap)
        r_new = defect(new)
        # halve while that does not grow the defect (ties: steps clamped at the cap)
        while adaptive and d > 1e-300:
            trial = min(gamma + 0.5 * d * r, cap)
            r_trial = defect(trial)
            if abs(r_trial) > abs(r_new):
                break
            d, new, r_new = 0.5 * d, trial, r_trial
        if new == gamma or (adaptive and abs(r_new) >= abs(r)):
            break
        gamma, r = new, r_new
    return gamma


def gamma_max(q: QueueMarket, p: float) -> float:
    """Upper bound on the joining rate when only mean and support are known.

    Exact as ``lam`` grows; assumes the M/M/1 wait.
    """
    denom = q.theta * q.market.mu + q.hold_cost - q.theta * p
    if denom <= 0:
        raise DomainError(f"price {p} too high: theta*mu + h - theta*p = {denom} <= 0")
    return q.theta - q.theta * q.hold_cost / denom


def p_max(q: QueueMarket) -> float:
    """Maximizer of ``p * gamma_max(p)``."""
    h, th, mu = q.hold_cost, q.theta, q.market.mu
    return mu - (math.sqrt(h * h + th * h * mu) - h) / th


@dataclass(frozen=True)
class QueuePricing:
    price: float
    equilibrium: Equilibrium
    modes: tuple  # (price, revenue) of each refined local maximum, by price

    @property
    def revenue(self) -> float:
        return self.equilibrium.revenue

    @property
    def mode(self) -> str:
        """``"low"`` when the lowest-priced local maximum wins, else ``"high"``."""
        return "low" if self.price == self.modes[0][0] else "high"

    def to_dict(self) -> dict:
        return {"price": self.price, "revenue": self.revenue,
                "gamma_star": self.equilibrium.gamma_star, "mode": self.mode,
                "modes": [list(m) for m in self.modes]}


def price_scan(q: QueueMarket, prices) -> np.ndarray:
    return np.array([equilibrium(q, float(p)).revenue for p in prices])


def optimal_queue_price(q: QueueMarket, n_grid: int = 2001, n_modes: int = 2) -> QueuePricing:
    """Maximin price for the queue.

    The revenue can be bimodal, so a coarse scan over ``(0, v_lo2]`` locates
    the local maxima and the best ``n_modes`` of them are refined by
    golden-section search.
    """
    top = breakpoints(q.market).v_lo2
    prices = np.linspace(0.0, top, n_grid + 1)[1:]
    rev = price_scan(q, prices)

    peaks = []
    for k in range(rev.size):
        left = rev[k - 1] if k > 0 else -np.inf
        right = rev[k + 1] if k + 1 < rev.size else -np.inf
        if rev[k] > left and rev[k] >= right and rev[k] > 0:
            peaks.append(k)
    if not peaks:
        eq = equilibrium(q, float(prices[0]))
        return QueuePricing(eq.price, eq, ((eq.price, eq.revenue),))
    peaks = sorted(peaks, key=lambda k: rev[k], reverse=True)[:n_modes]

    def neg_revenue(p):
        return -equilibrium(q, p).revenue

    modes = []
    for k in peaks:
        a = prices[k - 1] if k > 0 else prices[k] / 2
        c = prices[k + 1] if k + 1 < prices.size else prices[k]
        b = prices[k]
        if c > b:
            res = minimize_scalar(neg_revenue, bracket=(a, b, c), method="golden",
                                  tol=1e-10)
            x = float(res.x) if a <= res.x <= c and -res.fun >= rev[k] else float(b)
        else:
            x = float(b)
        modes.append((x, equilibrium(q, x).revenue))
    modes.sort()
    best_price = max(modes, key=lambda m: (m[1], m[0]))[0]
    return QueuePricing(best_price, equilibrium(q, best_price), tuple(modes))


def tail_region(q: QueueMarket, eq: Equilibrium) -> Region:
    """Tail-bound piece active at the equilibrium joining threshold."""
    threshold = eq.price
    if q.hold_cost and eq.gamma_star < q.theta:
        threshold += q.hold_cost * q.wait(eq.gamma_star, q.theta)
    if threshold >= q.market.beta:
        return Region.ZERO
    return classify_price(q.market, threshold)

"""Maximin posted prices.

The worst-case revenue ``p * inf P(X >= p)`` is piecewise with three smooth
pieces, and its global maximum always sits at one of three closed-form
prices:

* ``low``:  the stationary point of the Cantelli piece (depends on sigma_hi)
* ``mid``:  the stationary point of the mean/support piece (depends on beta)
* ``high``: the stationary point of the three-point piece (sigma_lo and beta)

Which one wins is decided by comparing the sigma bounds against the
threshold functions ``f``, ``g`` and ``h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import bisect

from .market import MarketInfo
from .tailbound import cantelli_fraction, check_price, tail_curve, tail_value

TIE_ATOL = 1e-12


class PriceRegion(str, Enum):
    LOW = "SigmaL"
    MID = "SigmaM"
    HIGH = "SigmaH"


# -- piece revenues ---------------------------------------------------------

def cantelli_revenue(p, mu, sigma):
    return p * cantelli_fraction(mu - p, sigma)


def mean_support_revenue(p, mu, beta):
    return p * (mu - p) / (beta - p)


def three_point_revenue(p, mu, sigma, beta):
    return p * (mu * (mu - p) + sigma * sigma) / (beta * (beta - p))


# -- candidate prices -------------------------------------------------------

def kappa(mu: float, sigma: float) -> float:
    """Real root factor of the cubic first-order condition of the Cantelli piece.

    Written as ``a - 1/a`` with ``a = cbrt(r + sqrt(1 + r^2))``; the second
    cube root of the textbook form has a negative argument and cancels badly
    for small sigma.
    """
    r = mu / sigma
    a = np.cbrt(r + math.hypot(1.0, r))
    return float(a - 1.0 / a)


def low_price(mu: float, sigma: float) -> float:
    if sigma == 0:
        return mu
    if mu / sigma > 1e100:
        # kappa ~ cbrt(2 mu / sigma); keeps sigma**(2/3) from underflowing via sigma**2
        p = mu - float(np.cbrt(2.0 * mu)) * sigma ** (2.0 / 3.0)
    else:
        p = mu - sigma * kappa(mu, sigma)
    # for sigma below ~1e-24 * mu the offset is under half an ulp; stay strictly below mu
    return p if p < mu else math.nextafter(mu, 0.0)


def mid_price(mu: float, beta: float) -> float:
    return beta - math.sqrt(beta * (beta - mu))


def high_price(mu: float, sigma: float, beta: float) -> float:
    return beta - math.sqrt(max(0.0, beta * (beta - mu - sigma * sigma / mu)))


def price_low(m: MarketInfo) -> float:
    return low_price(m.mu, m.sigma_hi)


def price_mid(m: MarketInfo) -> float:
    return mid_price(m.mu, m.beta)


def price_high(m: MarketInfo) -> float:
    return high_price(m.mu, m.sigma_lo, m.beta)


@dataclass(frozen=True)
class PriceCandidates:
    p_low: float
    p_mid: float
    p_high: float
    kappa: float

    def as_tuple(self) -> tuple[float, float, float]:
        return self.p_low, self.p_mid, self.p_high


def candidates(m: MarketInfo) -> PriceCandidates:
    k = kappa(m.mu, m.sigma_hi) if m.sigma_hi > 0 else math.inf
    return PriceCandidates(price_low(m), price_mid(m), price_high(m), k)


# -- worst-case revenue -------------------------------------------------------

def worst_case_revenue(m: MarketInfo, p: float) -> float:
    """``p`` times the worst-case probability that a customer buys.

    Two sets hold a single distribution whose atom sits exactly on a
    candidate price, and there the purchase event ``X >= p`` counts it:
    ``sigma_hi == 0`` (point mass at ``mu``, which buys at ``p = mu``) and
    ``sigma_lo == sigma_max`` (mass ``mu / beta`` at ``beta``, earning ``mu``
    at ``p = beta``).
    """
    p = check_price(m, p)
    if m.sigma_hi == 0 and p == m.mu:
        return p
    if m.sigma_lo == m.sigma_max and p == m.beta:
        return m.mu
    return p * tail_value(m, p)


def revenue_curve(m: MarketInfo, prices) -> np.ndarray:
    p = np.asarray(prices, dtype=float)
    out = p * tail_curve(m, p)
    if m.sigma_hi == 0:
        out = np.where(p == m.mu, p, out)
    if m.sigma_lo == m.sigma_max:
        out = np.where(p == m.beta, m.mu, out)
    return out


# -- thresholds ------------------------------------------------------------

def f_threshold(mu: float, beta: float) -> float:
    """sigma_hi at which the low and mid candidates earn the same."""
    gap = beta - mu
    return math.sqrt(32.0 / 27.0 * gap * (math.sqrt(beta * gap) - gap))


def _sigma_lo_matching(revenue: float, mu: float, beta: float) -> float:
    # sigma_lo whose high-price revenue equals ``revenue``; 0 if already exceeded
    arg = 2.0 * beta * math.sqrt(revenue * mu) - beta * revenue - mu * mu
    return math.sqrt(max(0.0, arg))


def g_threshold(mu: float, beta: float) -> float:
    """sigma_lo at which the mid and high candidates earn the same."""
    pm = mid_price(mu, beta)
    return _sigma_lo_matching(mean_support_revenue(pm, mu, beta), mu, beta)


def h_threshold(sigma_hi: float, mu: float, beta: float) -> float:
    """sigma_lo at which the low and high candidates earn the same."""
    if sigma_hi == 0:
        return math.sqrt(mu * (beta - mu))
    pl = low_price(mu, sigma_hi)
    return _sigma_lo_matching(cantelli_revenue(pl, mu, sigma_hi), mu, beta)


def sigma_star(mu: float, beta: float) -> float:
    """Switch point from low to high pricing when sigma is known exactly.

    No closed form exists; the low-price revenue falls and the high-price
    revenue rises in sigma, so the crossing is unique and found by bisection.
    """
    smax = math.sqrt(mu * (beta - mu))
    eps = 1e-9 * smax

    def gap(s):
        low = cantelli_revenue(low_price(mu, s), mu, s)
        high = three_point_revenue(high_price(mu, s, beta), mu, s, beta)
        return low - high

    return bisect(gap, eps, smax - eps, xtol=1e-15, rtol=8.9e-16, maxiter=200)


@dataclass(frozen=True)
class Thresholds:
    f_val: float
    g_val: float
    h_val: float
    sigma_bar_star: float
    sigma_star: Optional[float]


def thresholds(m: MarketInfo) -> Thresholds:
    f = f_threshold(m.mu, m.beta)
    sbar = math.sqrt(32.0 / 27.0 * (m.beta - m.mu)
                     * (math.sqrt(m.beta * (m.beta - m.mu)) - (m.beta - m.mu)))
    return Thresholds(
        f_val=f,
        g_val=g_threshold(m.mu, m.beta),
        h_val=h_threshold(m.sigma_hi, m.mu, m.beta),
        sigma_bar_star=sbar,
        sigma_star=sigma_star(m.mu, m.beta) if m.precise else None,
    )


def classify_region(m: MarketInfo, th: Thresholds | None = None) -> PriceRegion:
    """Which candidate price is optimal; boundaries resolve low, then mid, then high."""
    if th is None:
        th = Thresholds(f_threshold(m.mu, m.beta), g_threshold(m.mu, m.beta),
                        h_threshold(m.sigma_hi, m.mu, m.beta), math.nan, None)
    lo, hi = m.sigma_lo, m.sigma_hi
    if lo <= th.h_val and hi <= th.f_val:
        return PriceRegion.LOW
    if lo <= th.g_val and hi >= th.f_val:
        return PriceRegion.MID
    return PriceRegion.HIGH


@dataclass(frozen=True)
class PricingDecision:
    price: float
    region: PriceRegion
    worst_case_revenue: float
    candidates: PriceCandidates

    def to_dict(self) -> dict:
        return {
            "price": self.price,
            "region": self.region.value,
            "worst_case_revenue": self.worst_case_revenue,
            "candidates": {
                "low": self.candidates.p_low,
                "mid": self.candidates.p_mid,
                "high": self.candidates.p_high,
            },
        }


_CANDIDATE_BY_REGION = {
    PriceRegion.LOW: "p_low",
    PriceRegion.MID: "p_mid",
    PriceRegion.HIGH: "p_high",
}


def optimal_price(m: MarketInfo) -> PricingDecision:
    """Maximin price; exact revenue ties go to the higher price."""
    cand = candidates(m)
    region = classify_region(m)
    price = getattr(cand, _CANDIDATE_BY_REGION[region])
    revenue = worst_case_revenue(m, price)

    for other_region, attr in _CANDIDATE_BY_REGION.items():
        other = getattr(cand, attr)
        if other > price and 0 < other <= m.beta:
            r = worst_case_revenue(m, other)
            if abs(r - revenue) <= TIE_ATOL:
                price, region, revenue = other, other_region, r
    return PricingDecision(price, region, revenue, cand)


# -- auxiliary inequality behind the uniqueness of the low/high switch -------

#: grid points c_k at which r(c_k) > t(c_k + SWITCH_STEP) certifies r > t
SWITCH_GRID = (3 / 8, 23 / 48, 7 / 12, 11 / 16, 19 / 24, 43 / 48)
SWITCH_STEP = 5 / 48


def switch_r(c: float) -> float:
    return 3.0 + 2.0 * c * c - 1.5 * c


def switch_t(c: float) -> float:
    return (math.sqrt(1.0 + c ** 3) + 1.0) ** (4.0 / 3.0)


def switch_table() -> list[tuple[float, float, float]]:
    """Rows ``(c_k, r(c_k), t(c_k + 5/48))``.

    ``r`` is decreasing-then-increasing and ``t`` increasing, so checking
    ``r(c_k) > t(c_k + 5/48)`` on this grid proves ``r > t`` on each cell.
    """
    return [(c, switch_r(c), switch_t(c + SWITCH_STEP)) for c in SWITCH_GRID]

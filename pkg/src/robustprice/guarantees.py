"""Performance guarantees of the robust price against full information.

No member of the ambiguity set lets any price earn more than ``mu``
(Markov), and that bound is attained.  The guarantee ratio is therefore the
worst-case revenue of the robust price divided by ``mu``; each candidate
price has a closed form for it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .market import MarketInfo
from .pricing import (PriceRegion, cantelli_revenue, classify_region, high_price, kappa, low_price,
                      mid_price)
from .tailbound import DiscreteDistribution


class RatioKind(str, Enum):
    RHO_L = "RhoL"
    RHO_M = "RhoM"
    RHO_H = "RhoH"


@dataclass(frozen=True)
class GuaranteeReport:
    ratio: float
    ratio_kind: RatioKind
    opt_upper_bound: float

    def to_dict(self) -> dict:
        return {"ratio": self.ratio, "kind": self.ratio_kind.value,
                "opt_bound": self.opt_upper_bound}


def markov_opt_bound(m: MarketInfo) -> float:
    return m.mu


def markov_witness(m: MarketInfo, p: float) -> DiscreteDistribution:
    """Two points {0, p} whose optimal revenue equals ``mu``.

    Lies in the ambiguity set for ``p`` in ``[mu + sigma_lo^2/mu, mu + sigma_hi^2/mu]``.
    """
    lo = m.mu + m.sigma_lo ** 2 / m.mu
    hi = m.mu + m.sigma_hi ** 2 / m.mu
    if not (lo - 1e-12 <= p <= hi + 1e-12):
        raise ValueError(f"witness price must lie in [{lo}, {hi}], got {p}")
    w = m.mu / p
    return DiscreteDistribution([0.0, p], [1.0 - w, w])


def rho_low(mu: float, sigma_hi: float) -> float:
    if sigma_hi == 0:
        return 1.0
    if mu / sigma_hi > 1e100:
        # kappa**3 overflows against a subnormal sigma; go through the revenue itself
        return cantelli_revenue(low_price(mu, sigma_hi), mu, sigma_hi) / mu
    return 0.5 * sigma_hi / mu * kappa(mu, sigma_hi) ** 3


def rho_mid(mu: float, beta: float) -> float:
    return 2.0 / mu * (beta - math.sqrt(beta * (beta - mu))) - 1.0


def rho_high(mu: float, sigma_lo: float, beta: float) -> float:
    q = (mu * mu + sigma_lo * sigma_lo) / (mu * beta)
    return 2.0 * (1.0 - math.sqrt(max(0.0, 1.0 - q))) - q


def guarantee_ratio(m: MarketInfo) -> GuaranteeReport:
    region = classify_region(m)
    if region is PriceRegion.LOW:
        ratio, kind = rho_low(m.mu, m.sigma_hi), RatioKind.RHO_L
    elif region is PriceRegion.MID:
        ratio, kind = rho_mid(m.mu, m.beta), RatioKind.RHO_M
    else:
        ratio, kind = rho_high(m.mu, m.sigma_lo, m.beta), RatioKind.RHO_H
    return GuaranteeReport(ratio=ratio, ratio_kind=kind, opt_upper_bound=markov_opt_bound(m))


# -- comparative statics -----------------------------------------------------

def is_monotone(values, increasing: bool, atol: float = 1e-12) -> bool:
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d >= -atol)) if increasing else bool(np.all(d <= atol))


def is_quasiconvex(values, atol: float = 1e-10) -> bool:
    """Non-increasing up to the minimum and non-decreasing after it."""
    v = np.asarray(values, dtype=float)
    k = int(np.argmin(v))
    return is_monotone(v[: k + 1], False, atol) and is_monotone(v[k:], True, atol)


def monotonicity_checks(mu: float = 0.5, beta: float = 1.0, n: int = 100,
                        sigma_lo: float | None = None) -> dict[str, bool]:
    """Sweep-based checks of how candidate prices and ratios move.

    * low price and its ratio fall as sigma_hi grows;
    * mid price and its ratio fall as beta grows;
    * high price and its ratio rise with sigma_lo and fall as beta grows.
    """
    smax = math.sqrt(mu * (beta - mu))
    s_hi = np.linspace(0.0, smax, n + 1)[1:]
    betas = np.linspace(mu, 5.0 * beta, n + 1)[1:]
    s_lo = np.linspace(0.0, smax, n)
    sl = 0.5 * smax if sigma_lo is None else sigma_lo
    # betas large enough that sigma_lo stays feasible
    betas_h = np.linspace(mu + sl * sl / mu, 5.0 * beta, n + 1)[1:]
    return {
        "low_price_vs_sigma_hi": is_monotone([low_price(mu, s) for s in s_hi], False),
        "low_ratio_vs_sigma_hi": is_monotone([rho_low(mu, s) for s in s_hi], False),
        "mid_price_vs_beta": is_monotone([mid_price(mu, b) for b in betas], False),
        "mid_ratio_vs_beta": is_monotone([rho_mid(mu, b) for b in betas], False),
        "high_vs_sigma_lo": is_monotone([high_price(mu, s, beta) for s in s_lo], True)
        and is_monotone([rho_high(mu, s, beta) for s in s_lo], True),
        "high_vs_beta": is_monotone([high_price(mu, sl, b) for b in betas_h], False)
        and is_monotone([rho_high(mu, sl, b) for b in betas_h], False),
    }

"""Pricing a bundle of i.i.d. goods.

A bundle of ``size`` goods is priced through the average valuation: same
mean and bound, standard deviations shrunk by ``sqrt(size)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import SigmaOrder
from .market import MarketInfo
from .pricing import PricingDecision, optimal_price


@dataclass(frozen=True)
class BundleQuery:
    base: MarketInfo
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"bundle size must be a positive integer, got {self.size}")

    def per_good_market(self) -> MarketInfo:
        root = math.sqrt(self.size)
        b = self.base
        return MarketInfo(b.mu, b.sigma_lo / root, b.sigma_hi / root, b.beta)


@dataclass(frozen=True)
class BundleDecision:
    decision: PricingDecision
    size: int

    @property
    def bundle_price(self) -> float:
        return self.size * self.decision.price

    @property
    def bundle_revenue(self) -> float:
        return self.size * self.decision.worst_case_revenue

    def to_dict(self) -> dict:
        out = self.decision.to_dict()
        out.update(size=self.size, bundle_price=self.bundle_price,
                   bundle_revenue=self.bundle_revenue)
        return out


def bundle_price(q: BundleQuery) -> BundleDecision:
    """Robust per-good price of the averaged market; the bundle is posted at ``size`` times it."""
    return BundleDecision(optimal_price(q.per_good_market()), q.size)


def bundle_threshold(base: MarketInfo) -> float:
    """Bundle size beyond which the low price is guaranteed optimal.

    Sufficient only; requires a precisely known standard deviation.
    """
    if not base.precise:
        raise SigmaOrder("bundle threshold needs sigma_lo == sigma_hi")
    mu, beta, s = base.mu, base.beta, base.sigma_hi
    coef = ((1.0 + math.sqrt((beta + 3 * mu) / (beta - mu))) * beta + 2 * mu) / (2 * mu * mu * (beta - mu))
    return coef * s * s


def recommended_bundle_size(base: MarketInfo) -> int:
    return max(1, math.ceil(bundle_threshold(base)))

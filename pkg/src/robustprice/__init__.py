"""Maximin posted prices when only the mean, a variance range and an upper
bound of the valuation distribution are known."""

__version__ = "0.1.0"

from .bundling import (BundleDecision, BundleQuery, bundle_price, bundle_threshold,
                       recommended_bundle_size)
from .exceptions import (DomainError, Infeasible, MarketError, MeanOutOfRange,
                         PriceOutOfRange, RateOutOfRange, RobustPriceError,
                         SamplingFailed, SigmaInfeasible, SigmaOrder)
from .guarantees import GuaranteeReport, RatioKind, guarantee_ratio, markov_opt_bound
from .market import MarketInfo, breakpoints, max_sigma
from .pricing import (PriceCandidates, PriceRegion, PricingDecision, Thresholds,
                      candidates, classify_region, optimal_price, price_high,
                      price_low, price_mid, thresholds, worst_case_revenue)
from .queueing import (Equilibrium, QueueMarket, equilibrium, gamma_max,
                       optimal_queue_price, p_max, waiting_time)
from .tailbound import (DiscreteDistribution, Region, TailBoundResult,
                        witness_distribution, worst_case_tail)

__all__ = [
    "BundleDecision", "BundleQuery", "bundle_price", "bundle_threshold",
    "recommended_bundle_size", "DomainError", "Infeasible", "MarketError",
    "MeanOutOfRange", "PriceOutOfRange", "RateOutOfRange", "RobustPriceError",
    "SamplingFailed", "SigmaInfeasible", "SigmaOrder", "GuaranteeReport",
    "RatioKind", "guarantee_ratio", "markov_opt_bound", "MarketInfo",
    "breakpoints", "max_sigma", "PriceCandidates", "PriceRegion",
    "PricingDecision", "Thresholds", "candidates", "classify_region",
    "optimal_price", "price_high", "price_low", "price_mid", "thresholds",
    "worst_case_revenue", "Equilibrium", "QueueMarket", "equilibrium",
    "gamma_max", "optimal_queue_price", "p_max", "waiting_time",
    "DiscreteDistribution", "Region", "TailBoundResult", "witness_distribution",
    "worst_case_tail",
]

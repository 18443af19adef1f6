"""Moment/support ambiguity set for consumer valuations.

A market is described by the mean valuation ``mu``, an interval
``[sigma_lo, sigma_hi]`` for the standard deviation and an upper bound
``beta`` on valuations.  All distributions on ``[0, beta]`` matching these
summary statistics form the ambiguity set the seller guards against.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Mapping

from .exceptions import MarketError, MeanOutOfRange, SigmaInfeasible, SigmaOrder

#: absolute tolerance (currency units) for comparisons against breakpoints
BREAKPOINT_ATOL = 1e-12

# relative slack accepted above the maximal standard deviation before the
# value is clamped; absorbs rounding in e.g. c * sqrt(mu * (beta - mu))
_SIGMA_MAX_RTOL = 1e-12


def max_sigma(mu: float, beta: float) -> float:
    """Largest standard deviation of a distribution on [0, beta] with mean mu."""
    return math.sqrt(mu * (beta - mu))


@dataclass(frozen=True)
class MarketInfo:
    """Validated ambiguity-set parameters.

    Construction runs the full validation, so an instance always satisfies
    ``0 < mu < beta`` and ``0 <= sigma_lo <= sigma_hi <= sqrt(mu (beta - mu))``.
    """

    mu: float
    sigma_lo: float
    sigma_hi: float
    beta: float

    def __post_init__(self):
        mu, lo, hi, beta = (float(v) for v in (self.mu, self.sigma_lo, self.sigma_hi, self.beta))
        for label, value in (("mu", mu), ("sigma_lo", lo), ("sigma_hi", hi), ("beta", beta)):
            if not math.isfinite(value):
                raise MarketError(f"{label} must be finite, got {value!r}")
        if mu <= 0 or mu >= beta:
            raise MeanOutOfRange(f"need 0 < mu < beta, got mu={mu}, beta={beta}")
        if lo < 0:
            raise SigmaOrder(f"sigma_lo must be non-negative, got {lo}")
        if lo > hi:
            raise SigmaOrder(f"need sigma_lo <= sigma_hi, got {lo} > {hi}")
        smax = max_sigma(mu, beta)
        if hi > smax * (1 + _SIGMA_MAX_RTOL):
            raise SigmaInfeasible(
                f"sigma_hi={hi} exceeds sqrt(mu (beta - mu))={smax}")
        hi = min(hi, smax)
        lo = min(lo, hi)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma_lo", lo)
        object.__setattr__(self, "sigma_hi", hi)
        object.__setattr__(self, "beta", beta)

    @property
    def sigma_max(self) -> float:
        return max_sigma(self.mu, self.beta)

    @property
    def precise(self) -> bool:
        """True when the standard deviation is known exactly."""
        return self.sigma_lo == self.sigma_hi

    @property
    def second_moment_range(self) -> tuple[float, float]:
        mu2 = self.mu * self.mu
        return self.sigma_lo ** 2 + mu2, self.sigma_hi ** 2 + mu2

    def replace(self, **changes) -> "MarketInfo":
        fields = asdict(self)
        fields.update(changes)
        return MarketInfo(**fields)

    def scaled(self, c: float) -> "MarketInfo":
        """Market with all valuations multiplied by ``c > 0``."""
        return MarketInfo(c * self.mu, c * self.sigma_lo, c * self.sigma_hi, c * self.beta)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MarketInfo":
        """Build from a flat mapping; missing sigma bounds default to the widest set."""
        mu = float(data["mu"])
        beta = float(data["beta"])
        lo = data.get("sigma_lo")
        hi = data.get("sigma_hi")
        lo = 0.0 if lo is None else float(lo)
        if hi is None:
            hi = max_sigma(mu, beta) if 0 < mu < beta else 0.0
        return cls(mu, lo, float(hi), beta)


def validate(mu: float, sigma_lo: float, sigma_hi: float, beta: float) -> MarketInfo:
    """Return a validated :class:`MarketInfo` or raise the violated constraint."""
    return MarketInfo(mu, sigma_lo, sigma_hi, beta)


@dataclass(frozen=True)
class Breakpoints:
    """Prices where the worst-case tail changes its closed form.

    ``v_bar1 <= v_lo1 <= mu <= v_lo2 <= beta``.
    """

    v_bar1: float
    v_lo1: float
    v_lo2: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def breakpoints(m: MarketInfo) -> Breakpoints:
    gap = m.beta - m.mu
    return Breakpoints(
        v_bar1=m.mu - m.sigma_hi ** 2 / gap,
        v_lo1=m.mu - m.sigma_lo ** 2 / gap,
        v_lo2=m.mu + m.sigma_lo ** 2 / m.mu,
    )

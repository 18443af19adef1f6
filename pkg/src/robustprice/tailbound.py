"""Tight worst-case tail probabilities and the distributions attaining them.

For a price ``p`` the quantity ``inf P(X > p)`` over the ambiguity set has a
four-piece closed form: a Cantelli (one-sided Chebyshev) piece for low
prices, a mean/support piece, a three-point piece, and zero above
``v_lo2``.  Each piece is attained by an explicit two- or three-point
distribution, returned by :func:`witness_distribution`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import PriceOutOfRange
from .market import BREAKPOINT_ATOL, Breakpoints, MarketInfo, breakpoints


class Region(str, Enum):
    """Which closed-form piece of the tail bound applies at a price."""

    CANTELLI = "Cantelli"
    MEAN_SUPPORT = "MeanSupport"
    THREE_POINT = "ThreePoint"
    ZERO = "Zero"


@dataclass(frozen=True)
class TailBoundResult:
    value: float
    region: Region
    price: float

    def to_dict(self) -> dict:
        return {"p": self.price, "value": self.value, "region": self.region.value}


def cantelli_fraction(gap, sigma):
    """``gap^2 / (gap^2 + sigma^2)`` written so tiny arguments do not underflow to 0/0.

    ``gap = sigma = 0`` gives 1 (the zero-variance limit below the mean).
    """
    gap = np.abs(np.asarray(gap, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = 1.0 / (1.0 + (sigma / gap) ** 2)
    frac = np.where((gap == 0) & (sigma == 0), 1.0, frac)
    return float(frac) if frac.ndim == 0 else frac


def check_price(m: MarketInfo, p: float) -> float:
    p = float(p)
    if not (0 < p <= m.beta):
        raise PriceOutOfRange(f"price must lie in (0, beta={m.beta}], got {p}")
    return p


def _region(p: float, bp: Breakpoints, atol: float) -> Region:
    if p >= bp.v_lo2 - atol:
        return Region.ZERO
    if p <= bp.v_bar1 + atol:
        return Region.CANTELLI
    if p <= bp.v_lo1 + atol:
        return Region.MEAN_SUPPORT
    return Region.THREE_POINT


def classify_price(m: MarketInfo, p: float, bp: Breakpoints | None = None) -> Region:
    """Region tag at ``p``.

    Pieces overlap at the breakpoints; within ``BREAKPOINT_ATOL`` of one the
    zero piece wins at ``v_lo2`` and otherwise the leftmost applicable piece
    is reported.  The tolerant tag is only used when its formula gives the
    same value as the exact one (it may not when sigma is tiny and the
    Cantelli piece is steep).
    """
    bp = breakpoints(m) if bp is None else bp
    exact = _region(p, bp, 0.0)
    tagged = _region(p, bp, BREAKPOINT_ATOL)
    if tagged is not exact and p < m.beta:
        if abs(_piece_value(m, p, tagged) - _piece_value(m, p, exact)) > BREAKPOINT_ATOL:
            return exact
    return tagged


def _piece_value(m: MarketInfo, p: float, region: Region) -> float:
    mu, beta = m.mu, m.beta
    if region is Region.CANTELLI:
        return cantelli_fraction(mu - p, m.sigma_hi)
    if region is Region.MEAN_SUPPORT:
        return (mu - p) / (beta - p)
    if region is Region.THREE_POINT:
        return (mu * mu + m.sigma_lo ** 2 - mu * p) / (beta * (beta - p))
    return 0.0


def tail_value(m: MarketInfo, p: float, bp: Breakpoints | None = None) -> float:
    """Unchecked scalar tail bound; ``p`` beyond ``beta`` gives 0."""
    if p >= m.beta:
        return 0.0
    bp = breakpoints(m) if bp is None else bp
    return min(1.0, max(0.0, _piece_value(m, p, _region(p, bp, 0.0))))


def worst_case_tail(m: MarketInfo, p: float) -> TailBoundResult:
    """Smallest probability ``P(X > p)`` over every distribution in the set."""
    p = check_price(m, p)
    bp = breakpoints(m)
    region = classify_price(m, p, bp)
    value = 0.0 if region is Region.ZERO else tail_value(m, p, bp)
    return TailBoundResult(value=value, region=region, price=p)


def tail_curve(m: MarketInfo, prices) -> np.ndarray:
    """Vectorized tail bound over an array of prices in ``(0, beta]``."""
    p = np.asarray(prices, dtype=float)
    bp = breakpoints(m)
    mu, beta = m.mu, m.beta
    with np.errstate(divide="ignore", invalid="ignore"):
        cantelli = cantelli_fraction(mu - p, m.sigma_hi)
        mean_support = (mu - p) / (beta - p)
        three_point = (mu * mu + m.sigma_lo ** 2 - mu * p) / (beta * (beta - p))
    out = np.select(
        [p >= bp.v_lo2, p <= bp.v_bar1, p <= bp.v_lo1],
        [0.0, cantelli, mean_support],
        default=three_point,
    )
    return np.clip(out, 0.0, 1.0)


@dataclass(eq=False)
class DiscreteDistribution:
    """Finite-support distribution given by atoms and their probabilities."""

    atoms: np.ndarray
    probs: np.ndarray = field(repr=True)

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float).ravel()
        probs = np.asarray(self.probs, dtype=float).ravel()
        if atoms.shape != probs.shape:
            raise ValueError("atoms and probs must have equal length")
        if np.any(probs < -1e-15):
            raise ValueError(f"negative probability in {probs}")
        probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if not math.isclose(total, 1.0, abs_tol=1e-12):
            raise ValueError(f"probabilities sum to {total}, not 1")
        self.atoms = atoms
        self.probs = probs / total

    @property
    def mean(self) -> float:
        return float(self.atoms @ self.probs)

    @property
    def second_moment(self) -> float:
        return float((self.atoms ** 2) @ self.probs)

    @property
    def std(self) -> float:
        return math.sqrt(max(0.0, self.second_moment - self.mean ** 2))

    def tail(self, p: float, strict: bool = True) -> float:
        """``P(X > p)`` or, with ``strict=False``, ``P(X >= p)``."""
        mask = self.atoms > p if strict else self.atoms >= p
        return float(self.probs[mask].sum())

    def revenue(self, p: float) -> float:
        """Expected revenue ``p P(X >= p)`` of posting price ``p``."""
        return p * self.tail(p, strict=False)

    def optimal_revenue(self) -> tuple[float, float]:
        """Full-information optimum; for finite support it sits on an atom."""
        best_p, best_r = 0.0, 0.0
        for a in self.atoms[self.probs > 0]:
            r = self.revenue(float(a))
            if r > best_r:
                best_p, best_r = float(a), r
        return best_p, best_r

    def is_feasible(self, m: MarketInfo, tol: float = 1e-10) -> bool:
        lo, hi = m.second_moment_range
        s = self.second_moment
        return bool(
            np.all(self.atoms >= -tol) and np.all(self.atoms <= m.beta + tol)
            and abs(self.mean - m.mu) <= tol
            and lo - tol <= s <= hi + tol
        )

    def to_dict(self) -> dict:
        return {"atoms": self.atoms.tolist(), "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data) -> "DiscreteDistribution":
        return cls(data["atoms"], data["probs"])


def witness_distribution(m: MarketInfo, p: float) -> DiscreteDistribution:
    """A member of the ambiguity set whose mass above ``p`` equals the bound.

    The scenario is chosen from the exact position of ``p`` relative to the
    breakpoints, so the returned atoms never leave ``[0, beta]``.
    """
    p = check_price(m, p)
    bp = breakpoints(m)
    mu, beta, lo, hi = m.mu, m.beta, m.sigma_lo, m.sigma_hi

    if p >= bp.v_lo2:
        if p == mu:
            # only reachable with sigma_lo = 0
            return DiscreteDistribution([mu], [1.0])
        # two points {alpha_bar, p} with variance sigma_lo^2, no mass above p
        d = p - mu
        alpha_bar = max(0.0, mu - lo * lo / d)
        w_p = lo * lo / (d * d + lo * lo)
        return DiscreteDistribution([alpha_bar, p], [1.0 - w_p, w_p])

    if p <= bp.v_bar1:
        # two points {p, alpha} with variance sigma_hi^2
        d = mu - p
        alpha = min(beta, mu + hi * hi / d)
        w_p = hi * hi / (d * d + hi * hi)
        return DiscreteDistribution([p, alpha], [w_p, 1.0 - w_p])

    if p <= bp.v_lo1:
        w_beta = (mu - p) / (beta - p)
        return DiscreteDistribution([p, beta], [1.0 - w_beta, w_beta])

    # three points {0, p, beta} with second moment mu^2 + sigma_lo^2
    w_beta = (mu * mu + lo * lo - mu * p) / (beta * (beta - p))
    w_zero = ((beta - mu) * (p - mu) + lo * lo) / (beta * p)
    w_p = 1.0 - w_zero - w_beta
    return DiscreteDistribution([0.0, p, beta], [w_zero, w_p, w_beta])


def strict_vs_weak_equivalence(m: MarketInfo, p: float, grid=None,
                               offset: float = 1e-7) -> tuple[float, float]:
    """``(inf P(X >= p), inf P(X > p))`` computed by the discretized LP oracle.

    Both programs share one support: the lattice plus an atom ``offset * beta``
    below the (snapped) price.  Without that atom the weak program could
    only shed mass to the next lattice point down and would trail the strict
    one by a grid step's worth of slope.
    """
    from .oracle import GridSpec, lp_worst_tail, snap_price

    p = check_price(m, p)
    grid = GridSpec() if grid is None else grid
    left = snap_price(m, p, grid) - offset * m.beta
    weak = lp_worst_tail(m, p, grid, strict=False, extra_atoms=[left])
    strict = lp_worst_tail(m, p, grid, strict=True, extra_atoms=[left])
    return weak, strict

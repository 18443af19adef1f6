"""Brute-force references for the closed forms.

Nothing here reuses the closed-form tail bound: the worst case is found by
solving the moment problem as a finite LP on a support grid, and the best
price by scanning a dense price grid.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex
from .exceptions import SamplingFailed
from .market import MarketInfo, max_sigma
from .tailbound import DiscreteDistribution, check_price

#: half-width of the band that replaces moment equalities on the grid
MOMENT_BAND = 1e-9


@dataclass(frozen=True)
class GridSpec:
    n_atoms: int = 2001
    n_prices: int = 100_001

    def __post_init__(self):
        if self.n_atoms < 3 or self.n_prices < 3:
            raise ValueError("grid resolutions must be at least 3")


def support_grid(m: MarketInfo, grid: GridSpec) -> np.ndarray:
    """Uniform lattice on [0, beta], plus ``mu`` so small variances stay reachable."""
    lattice = np.linspace(0.0, m.beta, grid.n_atoms)
    return np.unique(np.r_[lattice, m.mu])


def snap_price(m: MarketInfo, p: float, grid: GridSpec) -> float:
    """Nearest point of the uniform support lattice (never 0)."""
    step = m.beta / (grid.n_atoms - 1)
    k = min(grid.n_atoms - 1, max(1, int(round(p / step))))
    return k * step


def lp_worst_tail(m: MarketInfo, p: float, grid: GridSpec | None = None,
                  strict: bool = True, extra_atoms=()) -> float:
    """Minimal ``P(X > p)`` (or ``P(X >= p)``) over grid-supported members of the set.

    ``p`` is first snapped to the support lattice; ``extra_atoms`` are added
    to the support.  The mean is an equality, the second moment must lie in
    its interval widened by ``MOMENT_BAND`` (in units of ``beta**2``).
    """
    grid = GridSpec() if grid is None else grid
    p = check_price(m, p)
    x = np.unique(np.r_[support_grid(m, grid), np.asarray(extra_atoms, dtype=float)]) / m.beta
    ps = snap_price(m, p, grid) / m.beta
    eps = 1e-12
    cost = (x > ps + eps) if strict else (x >= ps - eps)

    lo, hi = m.second_moment_range
    lo, hi = lo / m.beta ** 2 - MOMENT_BAND, hi / m.beta ** 2 + MOMENT_BAND
    n = x.size
    A = np.zeros((4, n + 2))
    A[0, :n] = 1.0
    A[1, :n] = x
    A[2, :n] = x * x
    A[2, n] = -1.0
    A[3, :n] = x * x
    A[3, n + 1] = 1.0
    b = np.array([1.0, m.mu / m.beta, lo, hi])
    c = np.r_[cost.astype(float), 0.0, 0.0]
    return simplex.solve(c, A, b).objective


def price_grid(m: MarketInfo, grid: GridSpec) -> np.ndarray:
    prices = np.linspace(0.0, m.beta, grid.n_prices)[1:]
    return np.unique(np.r_[prices, m.mu])


def grid_argmax_revenue(m: MarketInfo, grid: GridSpec | None = None) -> tuple[float, float]:
    """Best price on the grid by exhaustive scan; ties go to the higher price."""
    from .pricing import revenue_curve

    grid = GridSpec() if grid is None else grid
    prices = price_grid(m, grid)
    rev = revenue_curve(m, prices)
    k = rev.size - 1 - int(np.argmax(rev[::-1]))
    return float(prices[k]), float(rev[k])


def sample_feasible_distribution(m: MarketInfo, seed: int,
                                 max_attempts: int = 10_000) -> DiscreteDistribution:
    """Random four-atom member of the ambiguity set, reproducible per seed.

    Atoms are drawn uniformly (half of the attempts pin two of them to 0 and
    beta, which the high-variance corner needs).  The target second moment
    is drawn from its interval, the three moment equations are solved for
    the probabilities, and the free direction of the solution is sampled
    inside the non-negative range.
    """
    rng = np.random.default_rng(seed)
    lo, hi = m.second_moment_range
    for _ in range(max_attempts):
        if rng.random() < 0.5:
            atoms = np.r_[0.0, m.beta, rng.uniform(0.0, m.beta, 2)]
        else:
            atoms = rng.uniform(0.0, m.beta, 4)
        s2 = rng.uniform(lo, hi) if hi > lo else lo
        A = np.vstack([np.ones(4), atoms, atoms ** 2])
        b = np.array([1.0, m.mu, s2])
        if np.linalg.matrix_rank(A) < 3:
            continue
        q0, *_ = np.linalg.lstsq(A, b, rcond=None)
        null = np.linalg.svd(A)[2][-1]
        # q0 + t * null >= 0 for t in [t_lo, t_hi]
        with np.errstate(divide="ignore"):
            bounds = -q0 / null
        t_lo = np.max(bounds[null > 0], initial=-np.inf)
        t_hi = np.min(bounds[null < 0], initial=np.inf)
        if not (t_lo <= t_hi) or not np.isfinite(t_lo + t_hi):
            continue
        q = np.clip(q0 + rng.uniform(t_lo, t_hi) * null, 0.0, None)
        q /= q.sum()
        dist = DiscreteDistribution(atoms, q)
        if dist.is_feasible(m):
            return dist
    raise SamplingFailed(f"no feasible distribution after {max_attempts} attempts")


def random_market(rng: np.random.Generator) -> MarketInfo:
    """Random valid market spanning scales, means and both sigma bounds."""
    beta = rng.uniform(0.5, 5.0)
    mu = beta * rng.uniform(0.05, 0.95)
    sigma_hi = max_sigma(mu, beta) * rng.uniform(0.0, 1.0)
    sigma_lo = sigma_hi * rng.uniform(0.0, 1.0)
    return MarketInfo(mu, sigma_lo, sigma_hi, beta)


def random_price(m: MarketInfo, rng: np.random.Generator) -> float:
    return float(m.beta * (1.0 - rng.uniform(0.0, 1.0)))  # in (0, beta]

"""Error types raised by the library.

Every error carries its class name as a stable identifier; the CLI prints
that name on stderr.
"""


class RobustPriceError(ValueError):
    """Base class for all domain errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


class MarketError(RobustPriceError):
    """Invalid ambiguity-set parameters."""


class MeanOutOfRange(MarketError):
    pass


class SigmaOrder(MarketError):
    pass


class SigmaInfeasible(MarketError):
    pass


class PriceOutOfRange(RobustPriceError):
    pass


class RateOutOfRange(RobustPriceError):
    pass


class DomainError(RobustPriceError):
    pass


class Infeasible(RobustPriceError):
    """The discretized moment problem has no feasible point."""


class SamplingFailed(RobustPriceError):
    pass

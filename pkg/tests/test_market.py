import json
import math

import pytest
from hypothesis import given

from robustprice.exceptions import (MarketError, MeanOutOfRange, SigmaInfeasible,
                                    SigmaOrder)
from robustprice.market import MarketInfo, breakpoints, max_sigma, validate
from strategies import markets


def test_valid_market():
    m = validate(0.5, 0.1, 0.3, 1.0)
    assert (m.mu, m.sigma_lo, m.sigma_hi, m.beta) == (0.5, 0.1, 0.3, 1.0)
    assert not m.precise
    assert m.second_moment_range == pytest.approx((0.26, 0.34))


@pytest.mark.parametrize("args, err", [
    ((0.5, 0.0, 0.6, 1.0), SigmaInfeasible),
    ((1.0, 0.0, 0.0, 1.0), MeanOutOfRange),
    ((0.0, 0.0, 0.0, 1.0), MeanOutOfRange),
    ((1.2, 0.0, 0.0, 1.0), MeanOutOfRange),
    ((0.5, 0.3, 0.2, 1.0), SigmaOrder),
    ((0.5, -0.1, 0.2, 1.0), SigmaOrder),
    ((math.nan, 0.0, 0.2, 1.0), MarketError),
    ((0.5, 0.0, math.inf, 1.0), MarketError),
])
def test_invalid_markets(args, err):
    with pytest.raises(err) as info:
        validate(*args)
    assert info.value.name == err.__name__


def test_sigma_max_is_accepted():
    m = MarketInfo(0.5, 0.5, 0.5, 1.0)
    assert m.sigma_hi == max_sigma(0.5, 1.0) == 0.5


def test_sigma_max_rounding_is_clamped():
    smax = max_sigma(0.3, 1.7)
    m = MarketInfo(0.3, smax * (1 + 1e-14), smax * (1 + 1e-14), 1.7)
    assert m.sigma_hi == smax and m.sigma_lo == smax


@pytest.mark.parametrize("m, expected", [
    (MarketInfo(0.5, 0.3, 0.3, 1.0), (0.32, 0.32, 0.68)),
    (MarketInfo(0.5, 0.1, 0.3, 1.0), (0.32, 0.48, 0.52)),
    (MarketInfo(0.5, 0.0, 0.0, 1.0), (0.5, 0.5, 0.5)),
])
def test_breakpoints_examples(m, expected):
    bp = breakpoints(m)
    assert (bp.v_bar1, bp.v_lo1, bp.v_lo2) == pytest.approx(expected, abs=1e-12)


@given(markets())
def test_breakpoint_order(m):
    bp = breakpoints(m)
    tol = 1e-12 * m.beta
    assert bp.v_bar1 <= bp.v_lo1 + tol
    assert bp.v_lo1 <= m.mu + tol
    assert m.mu <= bp.v_lo2 + tol
    assert bp.v_lo2 <= m.beta + tol


@given(markets(precise=True))
def test_precise_breakpoints_coincide(m):
    bp = breakpoints(m)
    assert bp.v_bar1 == bp.v_lo1


@given(markets())
def test_validate_idempotent(m):
    assert validate(m.mu, m.sigma_lo, m.sigma_hi, m.beta) == m


@given(markets())
def test_json_round_trip(m):
    assert MarketInfo.from_dict(json.loads(json.dumps(m.to_dict()))) == m


def test_from_dict_defaults():
    m = MarketInfo.from_dict({"mu": 0.5, "beta": 1.0})
    assert m.sigma_lo == 0.0 and m.sigma_hi == 0.5


def test_replace_and_scaled():
    m = MarketInfo(0.5, 0.1, 0.3, 1.0)
    assert m.replace(sigma_lo=0.2).sigma_lo == 0.2
    s = m.scaled(4.0)
    assert (s.mu, s.sigma_lo, s.sigma_hi, s.beta) == (2.0, 0.4, 1.2, 4.0)
    with pytest.raises(SigmaOrder):
        m.replace(sigma_lo=0.4)

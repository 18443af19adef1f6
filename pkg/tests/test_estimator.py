import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from robustprice.bundling import BundleQuery, bundle_price
from robustprice.estimator import RobustPricer
from robustprice.guarantees import guarantee_ratio
from robustprice.market import MarketInfo
from robustprice.pricing import optimal_price

ROWS = np.array([
    [0.5, 0.2, 0.2, 1.0],
    [0.5, 0.0, 0.5, 1.0],
    [0.5, 0.45, 0.5, 1.0],
    [2.0, 1.0, 2.0, 10.0],
])


def test_transform_matches_library():
    out = RobustPricer().fit(ROWS).transform(ROWS)
    assert out.shape == (4, 4)
    for row, (price, revenue, ratio, code) in zip(ROWS, out):
        m = MarketInfo(*row)
        dec = optimal_price(m)
        assert price == dec.price
        assert revenue == dec.worst_case_revenue
        assert ratio == guarantee_ratio(m).ratio
        assert code == {"SigmaL": 0, "SigmaM": 1, "SigmaH": 2}[dec.region.value]
    assert list(out[:, 3]) == [0, 1, 2, 0]


def test_predict_is_price_column():
    est = RobustPricer().fit(ROWS)
    np.testing.assert_array_equal(est.predict(ROWS), est.transform(ROWS)[:, 0])


def test_bundle_size_param():
    est = clone(RobustPricer()).set_params(bundle_size=3).fit(ROWS[:1])
    m = MarketInfo(*ROWS[0])
    assert est.predict(ROWS[:1])[0] == bundle_price(BundleQuery(m, 3)).decision.price


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        RobustPricer().fit(ROWS[:, :3])
    with pytest.raises(ValueError):
        RobustPricer().fit(np.array([[1.0, 0.0, 0.0, 1.0]]))  # mean on the bound
    with pytest.raises(Exception):
        RobustPricer().transform(ROWS)  # not fitted


def test_pipeline_and_feature_names():
    pipe = make_pipeline(RobustPricer())
    assert pipe.fit_transform(ROWS).shape == (4, 4)
    assert list(RobustPricer().fit(ROWS).get_feature_names_out()) == [
        "price", "worst_case_revenue", "ratio", "region"]

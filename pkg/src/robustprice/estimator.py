"""scikit-learn adapter: one market per row in, one pricing decision per row out.

Nothing is learned from data -- the prices are closed forms of the row's
parameters -- so ``fit`` only checks the input shape.  The adapter exists so
batches of markets can flow through pipelines and ``set_params`` sweeps.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bundling import BundleQuery, bundle_price
from .guarantees import guarantee_ratio
from .market import MarketInfo
from .pricing import PriceRegion

COLUMNS = ("mu", "sigma_lo", "sigma_hi", "beta")
OUTPUTS = ("price", "worst_case_revenue", "ratio", "region")
_REGION_CODE = {PriceRegion.LOW: 0, PriceRegion.MID: 1, PriceRegion.HIGH: 2}


class RobustPricer(TransformerMixin, BaseEstimator):
    """Maximin price for each row ``(mu, sigma_lo, sigma_hi, beta)``.

    Parameters
    ----------
    bundle_size : int, default 1
        Price a bundle of this many i.i.d. goods; outputs are per good.
    """

    def __init__(self, bundle_size=1):
        self.bundle_size = bundle_size

    def _rows(self, X):
        X = check_array(X, dtype=float, ensure_min_features=4)
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 columns {COLUMNS}, got {X.shape[1]}")
        return X

    def fit(self, X, y=None):
        X = self._rows(X)
        for row in X:
            MarketInfo(*row)  # raises on invalid parameters
        self.n_features_in_ = 4
        return self

    def _decide(self, row):
        m = MarketInfo(*row)
        dec = bundle_price(BundleQuery(m, self.bundle_size)).decision
        ratio = guarantee_ratio(BundleQuery(m, self.bundle_size).per_good_market()).ratio
        return dec.price, dec.worst_case_revenue, ratio, _REGION_CODE[dec.region]

    def transform(self, X):
        """Columns: price, worst-case revenue, guarantee ratio, region code (0 low, 1 mid, 2 high)."""
        check_is_fitted(self, "n_features_in_")
        X = self._rows(X)
        return np.array([self._decide(row) for row in X], dtype=float).reshape(-1, 4)

    def predict(self, X):
        return self.transform(X)[:, 0]

    def get_feature_names_out(self, input_features=None):
        return np.array(OUTPUTS, dtype=object)

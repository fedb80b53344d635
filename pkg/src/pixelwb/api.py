"""Scikit-learn style wrappers around the estimation pipeline.

Both estimators are stateless (fit is a no-op that only validates input) and
expose get_params/set_params so they compose with sklearn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from . import estimators, pipeline
from .imagecore import check_image


class GlobalIlluminantEstimator(TransformerMixin, BaseEstimator):
    """Single global illuminant per image via one of the classical methods.

    predict returns the unit-norm illuminant; transform applies the von Kries
    correction with it.
    """

    def __init__(self, algo: str = "gray-world"):
        self.algo = algo

    def fit(self, X, y=None):
        estimators.parse_estimator(self.algo)
        check_image(X)
        return self

    def predict(self, X) -> np.ndarray:
        self.fit(X)
        return estimators.estimate(self.algo, estimators.Region(check_image(X)))

    def transform(self, X) -> np.ndarray:
        return pipeline.apply_correction(check_image(X), self.predict(X))


class PixelwiseIlluminantEstimator(TransformerMixin, BaseEstimator):
    """Blockwise estimates interpolated into a per-pixel illuminant field.

    predict returns the (H, W, 3) unit-norm field; transform returns the
    corrected image.  last_result_ carries the full pipeline output of the
    most recent call.
    """

    def __init__(self, algo: str = "gray-world", beta: int = 8,
                 sigma: float = 24.0, confidence: str = "off"):
        self.algo = algo
        self.beta = beta
        self.sigma = sigma
        self.confidence = confidence

    def _params(self) -> pipeline.PipelineParams:
        return pipeline.PipelineParams(beta=self.beta, sigma=self.sigma,
                                       estimator=self.algo,
                                       confidence=self.confidence)

    def fit(self, X, y=None):
        self._params()
        check_image(X)
        return self

    def predict(self, X) -> np.ndarray:
        self.last_result_ = pipeline.run_pipeline(check_image(X), self._params())
        return self.last_result_.field

    def transform(self, X) -> np.ndarray:
        X = check_image(X)
        return pipeline.apply_correction(X, self.predict(X))

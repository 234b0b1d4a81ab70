"""scikit-learn style estimators over the threshold engine.

Training labels name the exemplar set of each row, using the verdict
strings: ``"exhibits"`` for clear cases, ``"not_exhibits"`` for clear
non-cases and ``"borderline"`` for a priori borderline cases. ``predict``
returns labels from the same vocabulary.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .constructions import build_rescale_map
from .core import (
    ExemplarSets,
    Metric,
    ObservationSchema,
    SystemRecord,
    Verdict,
    build_framework,
    evaluate_metric,
)
from .thresholds import DEFAULT_EPSILON, determine, require_faithful

_LABEL_TO_SET = {
    Verdict.EXHIBITS.value: "clear",
    Verdict.NOT_EXHIBITS.value: "clear_non",
    Verdict.BORDERLINE.value: "borderline",
}


def _exemplars(X, y) -> ExemplarSets:
    unknown = set(np.unique(y)) - set(_LABEL_TO_SET)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}; expected a subset of {sorted(_LABEL_TO_SET)}")
    sets = {"clear": [], "clear_non": [], "borderline": []}
    for i, (row, label) in enumerate(zip(X, y)):
        sets[_LABEL_TO_SET[label]].append(SystemRecord(f"row-{i}", tuple(row)))
    return ExemplarSets(**{k: tuple(v) for k, v in sets.items()})


class VaguenessClassifier(ClassifierMixin, BaseEstimator):
    """Three-way classifier whose thresholds come from labelled exemplars.

    Parameters
    ----------
    metric : Metric, optional
        Feature-based metric (linear, or binarized/rescaled over a linear
        one). Defaults to the identity on a single feature with unbounded
        range.
    epsilon : float
        Absolute tolerance for every threshold comparison.

    Attributes
    ----------
    framework_ : PropertyFramework
    thresholds_ : Thresholds
    eta0_, gamma0_ : float
    classes_ : ndarray of str
    n_features_in_ : int
    """

    def __init__(self, metric=None, epsilon=DEFAULT_EPSILON, observer_id="estimator", property_name="P"):
        self.metric = metric
        self.epsilon = epsilon
        self.observer_id = observer_id
        self.property_name = property_name

    def _metric(self, n_features):
        if self.metric is None:
            if n_features != 1:
                raise ValueError("a metric is required when X has more than one feature")
            return Metric.linear([1.0])
        if self.metric.needs_system_id:
            raise ValueError("table-backed metrics need system ids and cannot be used on feature arrays")
        return self.metric

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, ensure_all_finite=True)
        y = np.asarray(y).astype(str)
        schema = ObservationSchema(tuple(f"x{i}" for i in range(X.shape[1])))
        framework = build_framework(self.observer_id, self.property_name, schema, _exemplars(X, y),
                                    self._metric(X.shape[1]))
        self.thresholds_ = require_faithful(framework, self.epsilon).thresholds
        self.framework_ = framework
        self.eta0_ = self.thresholds_.eta0
        self.gamma0_ = self.thresholds_.gamma0
        self.classes_ = np.array(sorted(_LABEL_TO_SET))
        self.n_features_in_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "thresholds_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, estimator was fitted with {self.n_features_in_}")
        return X

    def metric_values(self, X):
        X = self._check(X)
        metric = self.framework_.metric
        return np.array([evaluate_metric(metric, row) for row in X])

    def decision_function(self, X):
        """Signed distance to the exhibits threshold (metric value minus eta0)."""
        return self.metric_values(X) - self.eta0_

    def predict(self, X):
        return np.array([determine(v, self.thresholds_, self.epsilon).value for v in self.metric_values(X)])


class ScoreRescaler(TransformerMixin, BaseEstimator):
    """Rescale metric scores on [0, upper] so that clear non-cases become clear cases.

    ``fit`` takes a single column of scores with exemplar labels and learns
    eta0 and gamma0; ``transform`` applies the merged-region rescaling.
    """

    def __init__(self, upper=1.0, epsilon=DEFAULT_EPSILON):
        self.upper = upper
        self.epsilon = epsilon

    def fit(self, X, y):
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != 1:
            raise ValueError("ScoreRescaler expects a single column of metric scores")
        clf = VaguenessClassifier(Metric.linear([1.0], lower=0.0, upper=self.upper), epsilon=self.epsilon)
        clf.fit(X, y)
        self.rescale_map_ = build_rescale_map(clf.thresholds_, 0.0, self.upper)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "rescale_map_")
        X = check_array(X, dtype=np.float64, ensure_all_finite=True)
        if X.shape[1] != 1:
            raise ValueError("ScoreRescaler expects a single column of metric scores")
        return np.array([[self.rescale_map_(v)] for v in X[:, 0]])

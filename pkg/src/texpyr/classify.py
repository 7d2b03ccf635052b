"""Linear discriminant analysis with covariance shrinkage, k-NN, and evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from texpyr.errors import (
    DegenerateClass,
    DimensionMismatch,
    EmptyTestSet,
    EmptyTrainSet,
    SingularCovariance,
)

MODEL_VERSION = "lda-1"
# Scores this close to the best one count as tied, so the tie rule does not
# hinge on summation-order rounding.
TIE_RTOL = 1e-12


def _check_xy(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"got {x.shape} features for {y.shape[0]} labels")
    return x, y


@dataclass
class LdaModel:
    class_labels: list
    class_means: np.ndarray  # (C, d)
    covariance: np.ndarray  # shrunk pooled covariance (d, d)
    priors: np.ndarray  # (C,)
    shrinkage: float
    coef: np.ndarray  # (d, C): covariance^-1 @ mean_c
    intercept: np.ndarray  # (C,)

    @property
    def n_features(self) -> int:
        return self.class_means.shape[1]

    def decision_function(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.n_features:
            raise DimensionMismatch(f"model expects {self.n_features} dims, got {x.shape[1]}")
        scores = x @ self.coef + self.intercept
        return scores[0] if single else scores

    def predict(self, x) -> np.ndarray:
        scores = np.atleast_2d(self.decision_function(x))
        best = scores.max(axis=1, keepdims=True)
        tied = scores >= best - TIE_RTOL * np.maximum(1.0, np.abs(best))
        # argmax of a boolean row is its first True: the lowest tied class index
        return np.asarray(self.class_labels, dtype=object)[np.argmax(tied, axis=1)]

    def save(self, path) -> None:
        np.savez(
            path,
            version=np.array(MODEL_VERSION),
            class_labels=np.array([str(c) for c in self.class_labels]),
            class_means=self.class_means,
            covariance=self.covariance,
            priors=self.priors,
            shrinkage=np.array(self.shrinkage),
            coef=self.coef,
            intercept=self.intercept,
        )

    @classmethod
    def load(cls, path) -> "LdaModel":
        with np.load(path, allow_pickle=False) as z:
            if str(z["version"]) != MODEL_VERSION:
                raise ValueError(f"unsupported model version {z['version']}")
            return cls(
                class_labels=[str(c) for c in z["class_labels"]],
                class_means=z["class_means"],
                covariance=z["covariance"],
                priors=z["priors"],
                shrinkage=float(z["shrinkage"]),
                coef=z["coef"],
                intercept=z["intercept"],
            )


def shrunk_covariance(pooled: np.ndarray, shrinkage: float) -> np.ndarray:
    """``(1 - s) * pooled + s * mean_variance * I``."""
    d = pooled.shape[0]
    mean_var = float(np.trace(pooled)) / d
    return (1.0 - shrinkage) * pooled + shrinkage * mean_var * np.eye(d)


def lda_fit(train_vectors, labels, shrinkage: float = 0.01) -> LdaModel:
    x, y = _check_xy(train_vectors, labels)
    if not 0.0 <= shrinkage <= 1.0:
        raise ValueError(f"shrinkage must be in [0, 1], got {shrinkage}")
    classes = sorted(set(y.tolist()))
    if len(classes) < 2:
        raise DegenerateClass("LDA needs at least two classes")
    n, d = x.shape
    means = np.empty((len(classes), d))
    priors = np.empty(len(classes))
    scatter = np.zeros((d, d))
    for c, label in enumerate(classes):
        xc = x[y == label]
        if xc.shape[0] < 2:
            raise DegenerateClass(f"class {label!r} has fewer than 2 training samples")
        means[c] = xc.mean(axis=0)
        priors[c] = xc.shape[0] / n
        centered = xc - means[c]
        scatter += centered.T @ centered
    if n - len(classes) < 1:
        raise DegenerateClass("not enough samples to pool a covariance")
    pooled = scatter / (n - len(classes))
    pooled = 0.5 * (pooled + pooled.T)
    cov = shrunk_covariance(pooled, shrinkage)
    try:
        factor = cho_factor(cov, lower=True)
    except LinAlgError as exc:
        raise SingularCovariance(
            f"pooled covariance is not positive definite at shrinkage={shrinkage}"
        ) from exc
    coef = cho_solve(factor, means.T)
    if not np.all(np.isfinite(coef)):
        raise SingularCovariance("covariance solve produced non-finite coefficients")
    intercept = -0.5 * np.einsum("cd,dc->c", means, coef) + np.log(priors)
    return LdaModel(
        class_labels=classes,
        class_means=means,
        covariance=cov,
        priors=priors,
        shrinkage=float(shrinkage),
        coef=coef,
        intercept=intercept,
    )


def lda_predict(model: LdaModel, v):
    return model.predict(v)[0] if np.ndim(v) == 1 else model.predict(v)


@dataclass
class KnnModel:
    train_vectors: np.ndarray
    train_labels: np.ndarray
    k: int = 1
    class_labels: list = field(default_factory=list)

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.array([knn_predict(self.train_vectors, self.train_labels, v, self.k) for v in x], dtype=object)


def knn_fit(train_vectors, labels, k: int = 1) -> KnnModel:
    x, y = _check_xy(train_vectors, labels)
    if x.shape[0] == 0:
        raise EmptyTrainSet("k-NN needs at least one training vector")
    return KnnModel(x, y, k, sorted(set(y.tolist())))


def knn_predict(train_vectors, train_labels, v, k: int = 1):
    """Majority vote of the k Euclidean nearest training points.

    Vote ties go to the class with the smallest mean neighbour distance,
    then to the lowest class in sorted label order.
    """
    x, y = _check_xy(train_vectors, train_labels)
    if x.shape[0] == 0:
        raise EmptyTrainSet("k-NN needs at least one training vector")
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k must be in [1, {x.shape[0]}], got {k}")
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (x.shape[1],):
        raise DimensionMismatch(f"query has shape {v.shape}, train dims {x.shape[1]}")
    dist = np.sqrt(np.sum((x - v) ** 2, axis=1))
    nearest = np.argsort(dist, kind="stable")[:k]
    votes: dict = {}
    for idx in nearest:
        votes.setdefault(y[idx], []).append(dist[idx])
    classes = sorted(votes)
    return min(classes, key=lambda c: (-len(votes[c]), float(np.mean(votes[c])), classes.index(c)))


@dataclass
class EvalReport:
    accuracy: float
    classes: list
    confusion: np.ndarray  # rows: true class, columns: predicted class
    precision: dict
    recall: dict
    split: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "classes": [str(c) for c in self.classes],
            "confusion": self.confusion.tolist(),
            "precision": {str(k): v for k, v in self.precision.items()},
            "recall": {str(k): v for k, v in self.recall.items()},
            "split": self.split,
        }


def report_from_predictions(y_true: Sequence, y_pred: Sequence, classes=None, split=None) -> EvalReport:
    y_true = list(y_true)
    y_pred = list(y_pred)
    if not y_true:
        raise EmptyTestSet("cannot evaluate on an empty test set")
    if len(y_true) != len(y_pred):
        raise DimensionMismatch("prediction count differs from label count")
    classes = sorted(set(y_true) | set(y_pred)) if classes is None else list(classes)
    pos = {c: k for k, c in enumerate(classes)}
    conf = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        conf[pos[t], pos[p]] += 1
    predicted = conf.sum(axis=0)
    actual = conf.sum(axis=1)
    diag = np.diag(conf)
    return EvalReport(
        accuracy=float(diag.sum() / conf.sum()),
        classes=classes,
        confusion=conf,
        precision={c: float(diag[k] / predicted[k]) if predicted[k] else 0.0 for k, c in enumerate(classes)},
        recall={c: float(diag[k] / actual[k]) if actual[k] else 0.0 for k, c in enumerate(classes)},
        split=dict(split or {}),
    )


def evaluate(model, test_vectors, test_labels, split=None) -> EvalReport:
    x, y = _check_xy(test_vectors, test_labels)
    if x.shape[0] == 0:
        raise EmptyTestSet("cannot evaluate on an empty test set")
    pred = model.predict(x)
    classes = sorted(set(model.class_labels) | set(y.tolist()))
    return report_from_predictions(y.tolist(), list(pred), classes, split)

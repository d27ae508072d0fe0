"""L2-regularised logistic regression trained by full-batch gradient descent.

:class:`LogisticGD` follows the scikit-learn estimator protocol, so any other
scikit-learn binary classifier exposing ``decision_function`` or
``predict_proba`` can be used in its place by the index estimator.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y


class DegenerateTrainingSet(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierConfig:
    l2_lambda: float = 1e-3
    learn_rate: float = 0.1
    max_iters: int = 500
    grad_tol: float = 1e-6
    standardize: bool = True

    def __post_init__(self):
        for name in ("l2_lambda", "learn_rate", "grad_tol"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.l2_lambda < 0:
            raise ValueError("l2_lambda must be non-negative")
        if self.learn_rate <= 0 or self.grad_tol <= 0:
            raise ValueError("learn_rate and grad_tol must be positive")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class TrainedModel:
    weights: np.ndarray
    intercept: float
    feature_means: np.ndarray
    feature_stds: np.ndarray

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def linear(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return ((X - self.feature_means) / self.feature_stds) @ self.weights + self.intercept

    def to_json(self) -> dict:
        return {
            "weights": [float(v) for v in self.weights],
            "intercept": float(self.intercept),
            "feature_means": [float(v) for v in self.feature_means],
            "feature_stds": [float(v) for v in self.feature_stds],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainedModel":
        return cls(
            np.asarray(obj["weights"], dtype=float), float(obj["intercept"]),
            np.asarray(obj["feature_means"], dtype=float),
            np.asarray(obj["feature_stds"], dtype=float),
        )


def sigmoid(z):
    # tanh form does not overflow
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=float)))


def logistic_loss(w, b, X, y, l2_lambda):
    """Mean logistic loss plus (lambda/2)||w||^2 for labels in {-1, +1}."""
    margin = y * (X @ w + b)
    return float(np.mean(np.logaddexp(0.0, -margin)) + 0.5 * l2_lambda * (w @ w))


def logistic_grad(w, b, X, y, l2_lambda):
    """Gradient of :func:`logistic_loss` with respect to (w, b)."""
    margin = y * (X @ w + b)
    r = -y * sigmoid(-margin) / X.shape[0]
    return X.T @ r + l2_lambda * w, float(r.sum())


def fit(X, y, config: ClassifierConfig | None = None, seed: int = 0) -> TrainedModel:
    """Train on features ``X`` and labels ``y`` in {-1, +1}.

    Gradient descent from the zero vector; the step is halved whenever it
    would increase the loss, so the loss sequence never increases.
    Training is deterministic and does not consume ``seed``; it is accepted
    so every classifier shares the same signature.
    """
    model, _ = _fit(X, y, config or ClassifierConfig())
    return model


def _fit(X, y, cfg: ClassifierConfig):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be (n, L) and y must be (n,)")
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite feature in training data")
    if not (np.any(y == 1) and np.any(y == -1)):
        raise DegenerateTrainingSet("degenerate training set: both labels are required")

    L = X.shape[1]
    if cfg.standardize:
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        sd[sd == 0] = 1.0
    else:
        mu, sd = np.zeros(L), np.ones(L)
    Z = (X - mu) / sd

    w, b = np.zeros(L), 0.0
    lam = cfg.l2_lambda
    lr = cfg.learn_rate
    loss = logistic_loss(w, b, Z, y, lam)
    history = [loss]
    for _ in range(int(cfg.max_iters)):
        gw, gb = logistic_grad(w, b, Z, y, lam)
        if max(np.max(np.abs(gw), initial=0.0), abs(gb)) < cfg.grad_tol:
            break
        while True:
            w_new, b_new = w - lr * gw, b - lr * gb
            new_loss = logistic_loss(w_new, b_new, Z, y, lam)
            if new_loss <= loss or lr < 1e-12:
                break
            lr *= 0.5
        if new_loss > loss:
            break
        w, b, loss = w_new, b_new, new_loss
        history.append(loss)
    return TrainedModel(w, float(b), mu, sd), history


def score(model: TrainedModel, features) -> np.ndarray | float:
    """Probability of the positive class; scalar for a single feature vector."""
    p = sigmoid(model.linear(features))
    return float(p[0]) if np.ndim(features) == 1 else p


class LogisticGD(ClassifierMixin, BaseEstimator):
    """Logistic regression with an L2 penalty, fit by full-batch gradient descent.

    Parameters
    ----------
    l2_lambda : float, default=1e-3
        Strength of the ridge penalty on the weights (not the intercept).
    learn_rate : float, default=0.1
        Initial step; halved on any loss increase.
    max_iters : int, default=500
    grad_tol : float, default=1e-6
        Stop once the infinity norm of the gradient drops below this.
    standardize : bool, default=True
        Centre and scale features with statistics of the training data.
    """

    def __init__(self, l2_lambda=1e-3, learn_rate=0.1, max_iters=500, grad_tol=1e-6,
                 standardize=True):
        self.l2_lambda = l2_lambda
        self.learn_rate = learn_rate
        self.max_iters = max_iters
        self.grad_tol = grad_tol
        self.standardize = standardize

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = np.unique(y)
        if self.classes_.size != 2:
            raise DegenerateTrainingSet("degenerate training set: both labels are required")
        cfg = ClassifierConfig(self.l2_lambda, self.learn_rate, self.max_iters,
                               self.grad_tol, self.standardize)
        signs = np.where(y == self.classes_[1], 1.0, -1.0)
        self.model_, self.loss_history_ = _fit(X, signs, cfg)
        self.coef_ = self.model_.weights / self.model_.feature_stds
        self.intercept_ = self.model_.intercept - self.coef_ @ self.model_.feature_means
        self.n_features_in_ = X.shape[1]
        self.n_iter_ = len(self.loss_history_) - 1
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        X = check_array(X)
        return self.model_.linear(X)

    def predict_proba(self, X):
        p = sigmoid(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]


def as_estimator(clf=None):
    """A scikit-learn classifier from None, a :class:`ClassifierConfig` or an estimator."""
    if clf is None:
        return LogisticGD()
    if isinstance(clf, ClassifierConfig):
        return LogisticGD(**clf.to_dict())
    return clf


def decision_scores(est, X) -> np.ndarray:
    """Ranking scores for AUC: the linear score when available, else P(y=+1).

    The linear score orders samples exactly like the probability but does not
    saturate into ties.
    """
    if hasattr(est, "decision_function"):
        return np.asarray(est.decision_function(X), dtype=float).ravel()
    return np.asarray(est.predict_proba(X), dtype=float)[:, 1]

"""Scikit-learn style wrapper around the from-scratch trainer."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .mlp import TrainConfig, forward, train


def _check_2d(name, arr):
    a = np.asarray(arr, dtype=float)
    if a.ndim != 2:
        raise ValueError("%s must be 2-dimensional, got shape %s" % (name, a.shape))
    if a.shape[0] == 0:
        raise ValueError("%s must have at least one row" % name)
    if not np.all(np.isfinite(a)):
        raise ValueError("%s contains non-finite values" % name)
    return a


class MlpRegressor(BaseEstimator, RegressorMixin):
    """Multi-output MLP regressor (ReLU hidden layers, Adam, cosine
    warm restarts), trained by the package's own numpy engine."""

    def __init__(self, hidden_dims=(32,), learning_rate=5e-5,
                 weight_decay=1e-7, batch_size=128, epochs=20,
                 steps_per_epoch=0, warm_restart_t0=3.0,
                 warm_restart_tmult=2, eta_min=1e-6, seed=0):
        self.hidden_dims = hidden_dims
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.batch_size = batch_size
        self.epochs = epochs
        self.steps_per_epoch = steps_per_epoch
        self.warm_restart_t0 = warm_restart_t0
        self.warm_restart_tmult = warm_restart_tmult
        self.eta_min = eta_min
        self.seed = seed

    def _config(self):
        return TrainConfig(
            learning_rate=self.learning_rate,
            weight_decay=self.weight_decay,
            batch_size=self.batch_size,
            epochs=self.epochs,
            steps_per_epoch=self.steps_per_epoch,
            warm_restart_t0=self.warm_restart_t0,
            warm_restart_tmult=self.warm_restart_tmult,
            eta_min=self.eta_min,
            seed=self.seed,
            hidden_dims=tuple(self.hidden_dims),
        )

    def fit(self, X, y):
        X = _check_2d("X", X)
        y = _check_2d("y", y)
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y row counts differ")
        self.model_, self.loss_trace_ = train(self._config(), (X, y))
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise RuntimeError("call fit before predict")
        X = _check_2d("X", X)
        return forward(self.model_, X)

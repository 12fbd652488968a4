import numpy as np
import pytest
from sklearn.base import clone

from matinv.estimator import MlpRegressor


def _linear_problem(seed=0, count=400):
    rng = np.random.default_rng(seed)
    bmat = rng.uniform(-1, 1, (3, 4))
    x = rng.uniform(-1, 1, (count, 4))
    return x, x @ bmat.T


def test_fit_predict_reduces_error():
    x, y = _linear_problem()
    est = MlpRegressor(learning_rate=1e-2, weight_decay=0.0, epochs=300,
                       batch_size=400, warm_restart_t0=300.0, eta_min=1e-8,
                       hidden_dims=(32,), seed=1)
    baseline = np.mean(np.abs(y))
    est.fit(x, y)
    err = np.mean(np.abs(est.predict(x) - y))
    assert err < 0.1 * baseline
    assert len(est.loss_trace_) == 300


def test_get_params_and_clone():
    est = MlpRegressor(epochs=5, seed=42)
    params = est.get_params()
    assert params["epochs"] == 5 and params["seed"] == 42
    cloned = clone(est)
    assert cloned.get_params() == params


def test_set_params():
    est = MlpRegressor()
    est.set_params(epochs=7, learning_rate=1e-3)
    assert est.epochs == 7 and est.learning_rate == 1e-3


def test_input_validation():
    est = MlpRegressor(epochs=1)
    with pytest.raises(ValueError):
        est.fit(np.zeros(4), np.zeros((4, 1)))
    with pytest.raises(ValueError):
        est.fit(np.zeros((4, 2)), np.zeros((5, 1)))
    bad = np.zeros((4, 2))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        est.fit(bad, np.zeros((4, 1)))


def test_predict_before_fit():
    with pytest.raises(RuntimeError):
        MlpRegressor().predict(np.zeros((2, 4)))


def test_deterministic_per_seed():
    x, y = _linear_problem(seed=3, count=128)
    a = MlpRegressor(epochs=2, seed=9).fit(x, y).predict(x)
    b = MlpRegressor(epochs=2, seed=9).fit(x, y).predict(x)
    assert np.array_equal(a, b)

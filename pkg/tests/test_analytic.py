import numpy as np
import pytest

from matinv.analytic import build_two_layer, quadratic_error_sweep
from matinv.linearize import eval_linear, linearize_inverse
from matinv.mlp import forward

A0 = np.array([[2.0, 2.0], [2.0, 3.0]])


def test_zero_offset_gives_base_inverse_exactly():
    model = build_two_layer(A0)
    out = forward(model, np.zeros(4)).reshape(2, 2)
    assert np.array_equal(out, np.array([[1.5, -1.0], [-1.0, 1.0]]))


def test_hidden_width_is_2n2():
    assert build_two_layer(A0).hidden_width() == 8
    assert build_two_layer(np.eye(3)).hidden_width() == 18


def test_matches_eval_linear():
    model = build_two_layer(A0)
    lin = linearize_inverse(A0)
    rng = np.random.default_rng(0)
    xs = rng.uniform(-0.05, 0.05, size=(10**5, 4))
    preds = forward(model, xs)
    expected = lin.f0.ravel() + xs @ lin.coeff_matrix().T
    assert np.max(np.abs(preds - expected)) <= 1e-12


def test_matches_eval_linear_3x3():
    a0 = np.array([[1.0, 1, 1], [1, 2, 3], [1, 2, 4]])
    model = build_two_layer(a0)
    lin = linearize_inverse(a0)
    rng = np.random.default_rng(1)
    for _ in range(100):
        e = rng.uniform(-0.01, 0.01, (3, 3))
        got = forward(model, e.ravel()).reshape(3, 3)
        assert np.max(np.abs(got - eval_linear(lin, e))) <= 1e-12


def test_sweep_quadratic_ratio():
    rows = quadratic_error_sweep(A0, [0.02, 0.01, 0.005], 2000, seed=2)
    assert [r[0] for r in rows] == [0.02, 0.01, 0.005]
    assert 3.0 <= rows[0][1] / rows[1][1] <= 5.0
    assert 3.0 <= rows[1][1] / rows[2][1] <= 5.0
    assert all(r[2] == 0 for r in rows)  # no skipped draws at these scales


def test_sweep_zero_scale():
    rows = quadratic_error_sweep(A0, [0.01, 0.0], 50, seed=3)
    assert rows[-1] == (0.0, 0.0, 0)


def test_sweep_monotone_in_scale():
    rows = quadratic_error_sweep(A0, [0.04, 0.02, 0.01], 500, seed=4)
    errors = [r[1] for r in rows]
    assert errors[0] >= errors[1] >= errors[2]


def test_sweep_scale_precondition():
    with pytest.raises(ValueError):
        quadratic_error_sweep(A0, [1.0], 10, seed=0)

import numpy as np
import pytest

from matinv.lipschitz import (ElementwisePower, FullyConnected, PolyLipBound,
                              ReLU, Residual, Sigmoid, Tanh, apply_chain,
                              bound_for_block, chain_bound, check_bound_numeric,
                              compose, concat, eval_bound, format_bound,
                              from_jacobian_poly, lipschitz_bound)


def test_eval_constant_lipschitz():
    b = lipschitz_bound(3.0)
    assert eval_bound(b, 7.0, 9.0, 0.5) == pytest.approx(1.5)


def test_eval_square_bound():
    b = PolyLipBound(degree=1, terms={1: {(1, 0): 1.0, (0, 1): 1.0}})
    assert eval_bound(b, 2.0, 3.0, 0.5) == pytest.approx(2.5)


def test_eval_zero_bound():
    b = PolyLipBound(degree=0, terms={})
    assert eval_bound(b, 1.0, 2.0, 3.0) == 0.0


def test_negative_coefficients_rejected():
    with pytest.raises(ValueError):
        PolyLipBound(degree=1, terms={1: {(0, 0): -1.0}})


def test_compose_constants_multiply():
    b = compose(lipschitz_bound(2.0), lipschitz_bound(5.0), {1: 1.0})
    assert b.degree == 1
    assert eval_bound(b, 1.0, 1.0, 1.0) == pytest.approx(10.0)


def test_compose_degree_is_product():
    sq = bound_for_block(ElementwisePower(2))
    quad = compose(sq, sq, ElementwisePower(2).value_bound())
    assert quad.degree == sq.degree * sq.degree == 1
    cube = bound_for_block(ElementwisePower(3))
    deep = compose(PolyLipBound(degree=2, terms={2: {(0, 0): 1.0}}),
                   PolyLipBound(degree=3, terms={3: {(0, 0): 1.0}}),
                   {1: 1.0})
    assert deep.degree == 6


def test_compose_square_of_square_dominates():
    p2 = ElementwisePower(2)
    bound = compose(bound_for_block(p2), bound_for_block(p2), p2.value_bound())
    # |x^4 - y^4| on scalars
    assert check_bound_numeric([p2, p2], bound, 10_000, 10.0, seed=0, dim=1) == 0


def test_concat_sums_constants():
    b = concat(lipschitz_bound(2.0), lipschitz_bound(3.0))
    assert eval_bound(b, 0, 0, 1.0) == pytest.approx(5.0)


def test_concat_with_zero_unchanged():
    b = lipschitz_bound(4.0)
    z = PolyLipBound(degree=0, terms={})
    combined = concat(b, z)
    assert combined.terms == b.terms


def test_jacobian_constant_scalar():
    b = from_jacobian_poly({0: 2.5}, in_dim=1, out_dim=1)
    assert b.degree == 1
    assert eval_bound(b, 5.0, 7.0, 2.0) == pytest.approx(5.0)


def test_jacobian_power2_dominates():
    # p(t) = 2t bounds the derivative of x^2
    bound = from_jacobian_poly({1: 2.0}, in_dim=1, out_dim=1)
    assert check_bound_numeric([ElementwisePower(2)], bound, 10_000, 10.0,
                               seed=1, dim=1) == 0


def test_jacobian_out_dim_scaling():
    b1 = from_jacobian_poly({0: 1.0}, in_dim=3, out_dim=1)
    b2 = from_jacobian_poly({0: 1.0}, in_dim=3, out_dim=2)
    v1 = eval_bound(b1, 1, 1, 1)
    assert eval_bound(b2, 1, 1, 1) == pytest.approx(np.sqrt(2) * v1)


def test_block_bounds():
    assert eval_bound(bound_for_block(ReLU()), 9, 9, 1) == pytest.approx(1.0)
    p2 = bound_for_block(ElementwisePower(2))
    assert p2.terms[1] == {(1, 0): 1.0, (0, 1): 1.0}
    res = Residual([ReLU()])
    assert eval_bound(res.bound(), 0, 0, 1.0) == pytest.approx(2.0)


def test_fc_operator_norm_matches_svd():
    rng = np.random.default_rng(2)
    w = rng.uniform(-1, 1, (5, 3))
    fc = FullyConnected(w, np.zeros(5))
    assert fc.operator_norm() == pytest.approx(
        np.linalg.svd(w, compute_uv=False)[0], rel=1e-6)


def test_all_blocks_zero_violations():
    rng = np.random.default_rng(3)
    w = rng.uniform(-1, 1, (4, 4))
    blocks = [FullyConnected(w, rng.uniform(-1, 1, 4)), ReLU(), Sigmoid(dim=4),
              Tanh(), ElementwisePower(2), ElementwisePower(3),
              Residual([ReLU()])]
    for rng_range in (1.0, 10.0, 100.0):
        for block in blocks:
            assert check_bound_numeric([block], bound_for_block(block),
                                       2000, rng_range, seed=4, dim=4) == 0


def test_halved_bound_is_falsified():
    p2 = ElementwisePower(2)
    bound = bound_for_block(p2)
    halved = PolyLipBound(degree=1, terms={
        1: {k: 0.5 * v for k, v in bound.terms[1].items()}})
    assert check_bound_numeric([p2], halved, 10_000, 10.0, seed=5, dim=1) > 0


def test_chain_bound_certifies_box_output():
    rng = np.random.default_rng(6)
    blocks = [FullyConnected(rng.uniform(-1, 1, (8, 4)), rng.uniform(-1, 1, 8)),
              ReLU(),
              FullyConnected(rng.uniform(-1, 1, (4, 8)), rng.uniform(-1, 1, 4))]
    bound, value = chain_bound(blocks)
    assert check_bound_numeric(blocks, bound, 5000, 5.0, seed=7) == 0
    # the value bound dominates the sampled max of ||f(x)|| on the box
    box = 2.0
    xs = rng.uniform(-box, box, size=(2000, 4))
    out_norms = [float(np.sqrt(np.sum(apply_chain(blocks, x) ** 2))) for x in xs]
    cap = sum(c * (box * 2) ** e for e, c in value.items())
    assert max(out_norms) <= cap


def test_format_bound_golden():
    b = PolyLipBound(degree=2, terms={1: {(1, 0): 1.0, (0, 1): 1.0},
                                      2: {(0, 0): 3.0}})
    # exponent pairs are sorted (ex, ey), so the |y| term prints first
    assert format_bound(b) == "[1*|y|^1 + 1*|x|^1]*d^1 + [3]*d^2"
    assert format_bound(lipschitz_bound(2.5)) == "[2.5]*d^1"

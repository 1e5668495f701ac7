import numpy as np
import pytest

from stylesearch.errors import ShapeError
from stylesearch.nn import adam_step, init_adam
from stylesearch.nn.network import LayerParams


def scalar_params(value):
    return [LayerParams(np.array([value], dtype=np.float64), np.zeros(0))]


def scalar_grads(value):
    return [LayerParams(np.array([value], dtype=np.float64), np.zeros(0))]


def test_zero_gradient_leaves_params_unchanged():
    params = scalar_params(3.0)
    state = init_adam(params)
    adam_step(params, scalar_grads(0.0), state)
    assert params[0].weights[0] == 3.0
    assert state.step == 1


def test_first_step_moves_by_learning_rate():
    # with g=1 the bias-corrected moments are both exactly 1, so the update
    # is lr / (1 + eps)
    params = scalar_params(0.0)
    state = init_adam(params, learning_rate=0.001)
    adam_step(params, scalar_grads(1.0), state)
    assert params[0].weights[0] == pytest.approx(-0.001, rel=1e-6)


def test_equal_gradients_get_equal_updates():
    params = [LayerParams(np.array([1.0, 1.0]), np.zeros(0))]
    grads = [LayerParams(np.array([0.7, 0.7]), np.zeros(0))]
    state = init_adam(params, learning_rate=0.01)
    for _ in range(5):
        adam_step(params, grads, state)
    assert params[0].weights[0] == params[0].weights[1]


def test_shape_mismatch_rejected():
    params = scalar_params(0.0)
    state = init_adam(params)
    bad = [LayerParams(np.zeros(2), np.zeros(0))]
    with pytest.raises(ShapeError):
        adam_step(params, bad, state)


def test_none_layers_skipped():
    params = [None, LayerParams(np.ones(3), np.ones(2))]
    grads = [None, LayerParams(np.full(3, 0.5), np.full(2, 0.5))]
    state = init_adam(params)
    adam_step(params, grads, state)
    assert state.m[0] is None
    assert np.all(params[1].weights < 1.0)

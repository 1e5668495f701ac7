"""Adam optimizer with bias correction.

Accumulators mirror the network's parameter structure (None for
parameterless layers). adam_step mutates the parameter and state arrays
in place and returns them, so training loops can write
``params, state = adam_step(params, grads, state)`` and stay honest
about ownership.
"""

from dataclasses import dataclass, field

import numpy as np

from stylesearch.errors import ShapeError
from stylesearch.nn.network import LayerParams


@dataclass
class OptimizerState:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def init_adam(params, learning_rate=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8) -> OptimizerState:
    def zeros_like(ps):
        return [
            LayerParams(np.zeros_like(p.weights), np.zeros_like(p.biases)) if p is not None else None
            for p in ps
        ]

    return OptimizerState(learning_rate, beta1, beta2, epsilon, 0, zeros_like(params), zeros_like(params))


def _update(x, g, m, v, state, t):
    if x.shape != g.shape:
        raise ShapeError(f"gradient shape {g.shape} != parameter shape {x.shape}")
    b1, b2 = state.beta1, state.beta2
    m *= b1
    m += (1 - b1) * g
    v *= b2
    v += (1 - b2) * g * g
    m_hat = m / (1 - b1 ** t)
    v_hat = v / (1 - b2 ** t)
    x -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)


def adam_step(params, grads, state: OptimizerState):
    """One Adam update over every parameter array; increments the step count."""
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("params, grads and optimizer state have different layer counts")
    state.step += 1
    t = state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p is None:
            continue
        _update(p.weights, g.weights, m.weights, v.weights, state, t)
        _update(p.biases, g.biases, m.biases, v.biases, state, t)
    return params, state

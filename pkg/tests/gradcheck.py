"""Finite-difference gradient oracle.

Independent of the hand-written backward passes: it only calls forward()
and the scalar loss, perturbing one parameter at a time. Everything runs
in double precision; the training path itself stays float32.
"""

import numpy as np

from stylesearch.nn import backward, forward
from stylesearch.nn import functional as F

DEFAULT_H = 1e-3


def scalar_loss(net, x, target, loss_kind, training=False, rng_seed=0):
    rec = forward(net, x, training=training, rng=np.random.default_rng(rng_seed))
    out = rec.output
    if loss_kind == "mse":
        return F.mse(out, target)
    if loss_kind == "softmax_ce":
        value, _ = F.softmax_cross_entropy(out[None], target[None])
        return value
    raise ValueError(loss_kind)


def analytic_grads(net, x, target, loss_kind, training=False, rng_seed=0):
    rec = forward(net, x, training=training, rng=np.random.default_rng(rng_seed))
    out = rec.output
    if loss_kind == "mse":
        grad = F.mse_grad(out, target)
    elif loss_kind == "softmax_ce":
        _, grad = F.softmax_cross_entropy(out[None], target[None])
        grad = grad[0]
    else:
        raise ValueError(loss_kind)
    return backward(net, rec, grad)


def numeric_grads(net, x, target, loss_kind, h=DEFAULT_H, training=False, rng_seed=0):
    """Central differences over every parameter entry.

    The dropout rng is re-seeded identically for every evaluation so the
    perturbed losses see the same masks.
    """
    grads = []
    for p in net.params:
        if p is None:
            grads.append(None)
            continue
        entry = type(p)(np.zeros_like(p.weights), np.zeros_like(p.biases))
        for arr, out in ((p.weights, entry.weights), (p.biases, entry.biases)):
            flat = arr.reshape(-1)
            gout = out.reshape(-1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                up = scalar_loss(net, x, target, loss_kind, training, rng_seed)
                flat[i] = orig - h
                down = scalar_loss(net, x, target, loss_kind, training, rng_seed)
                flat[i] = orig
                gout[i] = (up - down) / (2 * h)
        grads.append(entry)
    return grads


def max_relative_error(analytic, numeric):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        if a is None:
            continue
        for aa, nn in ((a.weights, n.weights), (a.biases, n.biases)):
            denom = np.maximum(np.abs(aa) + np.abs(nn), 1e-6)
            worst = max(worst, float(np.max(np.abs(aa - nn) / denom)))
    return worst

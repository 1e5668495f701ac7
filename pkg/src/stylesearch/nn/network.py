"""Networks: an ordered layer list plus per-layer parameters.

forward() records every intermediate activation so backward() can run
without recomputation; both are pure functions of their arguments (the
rng for dropout is passed in explicitly).
"""

from dataclasses import dataclass, field

import numpy as np

from stylesearch.errors import ContractError, ShapeError
from stylesearch.nn import functional as F
from stylesearch.nn.layers import (
    Conv,
    Dense,
    Dropout,
    Flatten,
    LayerSpec,
    MaxPool,
    UpsampleNearest,
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    dropout_backward,
    dropout_forward,
    maxpool2d_backward,
    maxpool2d_forward,
    upsample_nearest_backward,
    upsample_nearest_forward,
)


@dataclass
class LayerParams:
    weights: np.ndarray
    biases: np.ndarray

    def copy(self):
        return LayerParams(self.weights.copy(), self.biases.copy())


@dataclass
class Network:
    layers: tuple
    params: list  # LayerParams per parameterized layer, None otherwise

    def clone_params(self):
        return [p.copy() if p is not None else None for p in self.params]

    def set_params(self, params):
        self.params = params

    @property
    def n_layers(self):
        return len(self.layers)


def _check_composition(layers):
    """Reject layer stacks whose statically-known shapes cannot compose."""
    channels = None   # known channel count while in image mode
    vec_size = None   # known vector size after Flatten
    image_mode = True
    for i, layer in enumerate(layers):
        if isinstance(layer, Conv):
            if not image_mode:
                raise ShapeError(f"layer {i}: Conv after Flatten")
            if channels is not None and layer.in_channels != channels:
                raise ShapeError(
                    f"layer {i}: Conv expects {layer.in_channels} channels, "
                    f"previous layer produces {channels}"
                )
            channels = layer.out_channels
        elif isinstance(layer, (MaxPool, UpsampleNearest)):
            if not image_mode:
                raise ShapeError(f"layer {i}: {type(layer).__name__} after Flatten")
        elif isinstance(layer, Flatten):
            image_mode = False
            vec_size = None
        elif isinstance(layer, Dense):
            if image_mode and channels is not None:
                raise ShapeError(f"layer {i}: Dense after an image layer needs a Flatten")
            if vec_size is not None and layer.in_size != vec_size:
                raise ShapeError(
                    f"layer {i}: Dense expects {layer.in_size} inputs, "
                    f"previous layer produces {vec_size}"
                )
            image_mode = False
            vec_size = layer.out_size
        elif isinstance(layer, Dropout):
            pass
        else:
            raise ShapeError(f"layer {i}: unknown layer spec {layer!r}")


def init_network(layers, seed=0, dtype=np.float32) -> Network:
    """He-uniform init for relu layers, Glorot-uniform otherwise, zero biases."""
    layers = tuple(layers)
    _check_composition(layers)
    rng = np.random.default_rng(seed)
    params = []
    for layer in layers:
        if isinstance(layer, Conv):
            fan_in = layer.kernel_h * layer.kernel_w * layer.in_channels
            fan_out = layer.kernel_h * layer.kernel_w * layer.out_channels
            shape = (layer.kernel_h, layer.kernel_w, layer.in_channels, layer.out_channels)
            n_bias = layer.out_channels
        elif isinstance(layer, Dense):
            fan_in, fan_out = layer.in_size, layer.out_size
            shape = (layer.in_size, layer.out_size)
            n_bias = layer.out_size
        else:
            params.append(None)
            continue
        if layer.activation == "relu":
            limit = np.sqrt(6.0 / fan_in)
        else:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=shape).astype(dtype)
        params.append(LayerParams(weights, np.zeros(n_bias, dtype=dtype)))
    return Network(layers, params)


@dataclass
class ForwardRecord:
    """Everything backward() needs: the input, per-layer outputs and caches."""
    net: Network
    x0: np.ndarray
    outputs: list
    aux: list
    training: bool
    batched: bool

    @property
    def output(self):
        out = self.outputs[-1]
        return out if self.batched else out[0]


def _as_batch(x, first_layer):
    x = np.asarray(x)
    wants_image = isinstance(first_layer, (Conv, MaxPool, UpsampleNearest, Flatten))
    if wants_image:
        if x.ndim == 3:
            return x[None], False
        if x.ndim == 4:
            return x, True
        raise ShapeError(f"expected an (H, W, C) image or (N, H, W, C) batch, got {x.shape}")
    if x.ndim == 1:
        return x[None], False
    if x.ndim == 2:
        return x, True
    raise ShapeError(f"expected a vector or (N, D) batch, got {x.shape}")


def forward(net: Network, x, training=False, rng=None) -> ForwardRecord:
    """Run every layer, keeping all activations. Dropout fires only when
    training is set, and then requires an rng."""
    if training and rng is None and any(isinstance(l, Dropout) and l.rate > 0 for l in net.layers):
        raise ContractError("training forward through dropout requires an rng")
    batch, batched = _as_batch(x, net.layers[0] if net.layers else None)
    outputs, aux = [], []
    cur = batch
    for layer, p in zip(net.layers, net.params):
        if isinstance(layer, Conv):
            pre, cache = conv2d_forward(cur, p.weights, p.biases, layer.stride, layer.padding)
            cur = F.activation(layer.activation, pre)
            aux.append(cache)
        elif isinstance(layer, MaxPool):
            shape = cur.shape
            cur, argmax = maxpool2d_forward(cur, layer.pool_h, layer.pool_w)
            aux.append((argmax, shape))
        elif isinstance(layer, UpsampleNearest):
            cur = upsample_nearest_forward(cur, layer.factor)
            aux.append(None)
        elif isinstance(layer, Flatten):
            shape = cur.shape
            cur = cur.reshape(cur.shape[0], -1)
            aux.append(shape)
        elif isinstance(layer, Dense):
            pre = dense_forward(cur, p.weights, p.biases)
            cur = F.activation(layer.activation, pre)
            aux.append(None)
        elif isinstance(layer, Dropout):
            if training:
                cur, keep = dropout_forward(cur, layer.rate, rng)
            else:
                keep = None
            aux.append(keep)
        outputs.append(cur)
    return ForwardRecord(net, batch, outputs, aux, training, batched)


def backward(net: Network, record: ForwardRecord, loss_grad):
    """Backpropagate a loss gradient; returns per-layer parameter gradients
    mirroring net.params."""
    if record.net is not net or len(record.outputs) != len(net.layers):
        raise ContractError("activation record does not belong to this network")
    grad = np.asarray(loss_grad)
    if not record.batched:
        grad = grad[None]
    if grad.shape != record.outputs[-1].shape:
        raise ShapeError(
            f"loss gradient shape {grad.shape} != output shape {record.outputs[-1].shape}"
        )
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        p = net.params[i]
        layer_in = record.outputs[i - 1] if i > 0 else record.x0
        if isinstance(layer, Conv):
            grad = F.activation_grad(layer.activation, record.outputs[i], grad)
            grad, gw, gb = conv2d_backward(grad, p.weights, record.aux[i], layer.stride)
            grads[i] = LayerParams(gw, gb)
        elif isinstance(layer, MaxPool):
            argmax, in_shape = record.aux[i]
            grad = maxpool2d_backward(grad, argmax, in_shape, layer.pool_h, layer.pool_w)
        elif isinstance(layer, UpsampleNearest):
            grad = upsample_nearest_backward(grad, layer.factor)
        elif isinstance(layer, Flatten):
            grad = grad.reshape(record.aux[i])
        elif isinstance(layer, Dense):
            grad = F.activation_grad(layer.activation, record.outputs[i], grad)
            grad, gw, gb = dense_backward(grad, layer_in, p.weights)
            grads[i] = LayerParams(gw, gb)
        elif isinstance(layer, Dropout):
            grad = dropout_backward(grad, record.aux[i])
    return grads


def infer(net: Network, x):
    """Inference-mode forward pass returning just the final activation."""
    return forward(net, x, training=False).output

"""Layer specs and their forward/backward kernels.

Every kernel operates on a batch laid out as (N, H, W, C) / (N, D) and
preserves the input dtype. Backward passes are written by hand per layer;
there is no expression graph. Images are row-major (h, w, c), matching
the rest of the package.
"""

from dataclasses import dataclass

import numpy as np

from stylesearch.errors import ShapeError

PADDING_MODES = ("same", "valid")


@dataclass(frozen=True)
class Conv:
    in_channels: int
    out_channels: int
    kernel_h: int = 3
    kernel_w: int = 3
    stride: int = 1
    padding: str = "same"
    activation: str = "relu"

    def __post_init__(self):
        if min(self.in_channels, self.out_channels, self.kernel_h, self.kernel_w, self.stride) < 1:
            raise ShapeError(f"conv counts must be >= 1: {self}")
        if self.padding not in PADDING_MODES:
            raise ShapeError(f"unknown padding mode {self.padding!r}")


@dataclass(frozen=True)
class MaxPool:
    pool_h: int = 2
    pool_w: int = 2

    def __post_init__(self):
        if min(self.pool_h, self.pool_w) < 1:
            raise ShapeError(f"pool window must be >= 1: {self}")


@dataclass(frozen=True)
class UpsampleNearest:
    factor: int = 2

    def __post_init__(self):
        if self.factor < 1:
            raise ShapeError(f"upsample factor must be >= 1: {self}")


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class Dense:
    in_size: int
    out_size: int
    activation: str = "linear"

    def __post_init__(self):
        if min(self.in_size, self.out_size) < 1:
            raise ShapeError(f"dense sizes must be >= 1: {self}")


@dataclass(frozen=True)
class Dropout:
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ShapeError(f"dropout rate must lie in [0, 1): {self.rate}")


LayerSpec = Conv | MaxPool | UpsampleNearest | Flatten | Dense | Dropout


# ---------------------------------------------------------------- conv2d

def same_padding(in_h, in_w, kh, kw, stride):
    """Zero-padding amounts (top, bottom, left, right) for 'same' output.

    Output dims are ceil(in / stride); asymmetric padding puts the extra
    row/column on the bottom/right.
    """
    out_h = -(-in_h // stride)
    out_w = -(-in_w // stride)
    pad_h = max(0, (out_h - 1) * stride + kh - in_h)
    pad_w = max(0, (out_w - 1) * stride + kw - in_w)
    top, left = pad_h // 2, pad_w // 2
    return top, pad_h - top, left, pad_w - left


def _im2col(x, kh, kw, stride):
    """(N, H, W, C) -> (N*OH*OW, kh*kw*C) patch matrix."""
    n, h, w, c = x.shape
    oh = (h - kh) // stride + 1
    ow = (w - kw) // stride + 1
    sn, sh, sw, sc = x.strides
    windows = np.lib.stride_tricks.as_strided(
        x,
        shape=(n, oh, ow, kh, kw, c),
        strides=(sn, sh * stride, sw * stride, sh, sw, sc),
        writeable=False,
    )
    return np.ascontiguousarray(windows).reshape(n * oh * ow, kh * kw * c), oh, ow


def _col2im(cols, padded_shape, kh, kw, stride, oh, ow):
    """Scatter-add patch gradients back onto the padded input."""
    n, hp, wp, c = padded_shape
    grad = np.zeros(padded_shape, dtype=cols.dtype)
    cols = cols.reshape(n, oh, ow, kh, kw, c)
    for i in range(kh):
        for j in range(kw):
            grad[:, i:i + oh * stride:stride, j:j + ow * stride:stride, :] += cols[:, :, :, i, j, :]
    return grad


def conv2d_forward(x, weights, bias, stride=1, padding="same"):
    """Cross-correlate a batch with a (kh, kw, Cin, Cout) kernel.

    Returns (pre_activation, cache); the cache carries what the backward
    pass needs. No activation is applied here.
    """
    n, h, w, c = x.shape
    kh, kw, cin, cout = weights.shape
    if c != cin:
        raise ShapeError(f"conv input has {c} channels, kernel expects {cin}")
    if padding == "same":
        top, bottom, left, right = same_padding(h, w, kh, kw, stride)
        xp = np.pad(x, ((0, 0), (top, bottom), (left, right), (0, 0)))
        crop = (top, bottom, left, right)
    elif padding == "valid":
        xp = x
        crop = (0, 0, 0, 0)
    else:
        raise ShapeError(f"unknown padding mode {padding!r}")
    if xp.shape[1] < kh or xp.shape[2] < kw:
        raise ShapeError(
            f"kernel {kh}x{kw} larger than padded input {xp.shape[1]}x{xp.shape[2]}"
        )
    cols, oh, ow = _im2col(xp, kh, kw, stride)
    wmat = weights.reshape(kh * kw * cin, cout)
    out = (cols @ wmat + bias).reshape(n, oh, ow, cout)
    cache = (cols, xp.shape, crop, oh, ow)
    return out, cache


def conv2d_backward(grad_out, weights, cache, stride=1):
    """Gradients of a conv: (d input, d weights, d bias)."""
    kh, kw, cin, cout = weights.shape
    cols, padded_shape, crop, oh, ow = cache
    n = padded_shape[0]
    gmat = grad_out.reshape(n * oh * ow, cout)
    grad_b = gmat.sum(axis=0)
    grad_w = (cols.T @ gmat).reshape(kh, kw, cin, cout)
    grad_cols = gmat @ weights.reshape(kh * kw * cin, cout).T
    grad_padded = _col2im(grad_cols, padded_shape, kh, kw, stride, oh, ow)
    top, bottom, left, right = crop
    hp, wp = padded_shape[1], padded_shape[2]
    grad_x = grad_padded[:, top:hp - bottom, left:wp - right, :]
    return grad_x, grad_w, grad_b


def conv2d(image, weights, bias, stride=1, padding="same"):
    """Single-image convenience wrapper: (H, W, C) in, (OH, OW, Cout) out."""
    out, _ = conv2d_forward(image[None], weights, bias, stride, padding)
    return out[0]


# -------------------------------------------------------------- maxpool2d

def maxpool2d_forward(x, pool_h, pool_w):
    """Per-window max. Input dims must divide by the pool window."""
    n, h, w, c = x.shape
    if h % pool_h or w % pool_w:
        raise ShapeError(f"pool {pool_h}x{pool_w} does not divide input {h}x{w}")
    oh, ow = h // pool_h, w // pool_w
    windows = x.reshape(n, oh, pool_h, ow, pool_w, c)
    windows = windows.transpose(0, 1, 3, 2, 4, 5).reshape(n, oh, ow, pool_h * pool_w, c)
    argmax = windows.argmax(axis=3)
    out = np.take_along_axis(windows, argmax[:, :, :, None, :], axis=3)[:, :, :, 0, :]
    return out, argmax


def maxpool2d_backward(grad_out, argmax, x_shape, pool_h, pool_w):
    """Route each window's gradient to its argmax position."""
    n, h, w, c = x_shape
    oh, ow = h // pool_h, w // pool_w
    windows = np.zeros((n, oh, ow, pool_h * pool_w, c), dtype=grad_out.dtype)
    np.put_along_axis(windows, argmax[:, :, :, None, :], grad_out[:, :, :, None, :], axis=3)
    windows = windows.reshape(n, oh, ow, pool_h, pool_w, c).transpose(0, 1, 3, 2, 4, 5)
    return windows.reshape(n, h, w, c)


def maxpool2d(image, pool_h, pool_w):
    """Single-image wrapper returning (pooled, argmax indices)."""
    out, argmax = maxpool2d_forward(image[None], pool_h, pool_w)
    return out[0], argmax[0]


# ------------------------------------------------------- upsample_nearest

def upsample_nearest_forward(x, factor):
    if factor < 1:
        raise ShapeError(f"upsample factor must be >= 1: {factor}")
    return np.repeat(np.repeat(x, factor, axis=1), factor, axis=2)


def upsample_nearest_backward(grad_out, factor):
    n, h, w, c = grad_out.shape
    return grad_out.reshape(n, h // factor, factor, w // factor, factor, c).sum(axis=(2, 4))


def upsample_nearest(image, factor):
    return upsample_nearest_forward(image[None], factor)[0]


# ------------------------------------------------------------------ dense

def dense_forward(x, weights, bias):
    """x (N, Din) @ weights (Din, Dout) + bias."""
    if x.shape[-1] != weights.shape[0]:
        raise ShapeError(f"dense input dim {x.shape[-1]} != weight dim {weights.shape[0]}")
    return x @ weights + bias


def dense_backward(grad_out, x, weights):
    grad_w = x.T @ grad_out
    grad_b = grad_out.sum(axis=0)
    grad_x = grad_out @ weights.T
    return grad_x, grad_w, grad_b


def dense(vector, weights, bias):
    """Single-vector wrapper."""
    return dense_forward(vector[None], weights, bias)[0]


# ---------------------------------------------------------------- dropout

def dropout_forward(x, rate, rng):
    """Inverted dropout: survivors scaled by 1/(1-rate) at training time."""
    if rate == 0.0:
        return x, None
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)
    keep = keep.astype(x.dtype)
    return x * keep, keep


def dropout_backward(grad_out, keep):
    if keep is None:
        return grad_out
    return grad_out * keep

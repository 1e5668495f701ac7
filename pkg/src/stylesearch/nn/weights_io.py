"""FNNW network weights file.

Layout (all integers little-endian):

    magic  b"FNNW"
    u32    version (= 1)
    u32    layer count
    per layer:
        u8   variant tag (1 Conv, 2 MaxPool, 3 UpsampleNearest,
                          4 Flatten, 5 Dense, 6 Dropout)
        u32  dims, per variant (see _DIMS below); the Dropout rate is a
             float32 carried in the u32 slot via its bit pattern
        u64  parameter count (weights plus biases; 0 if parameterless)
        f32  parameters, weights first then biases

load(save(net)) reproduces layer specs and parameter arrays bit-exactly.
"""

import struct

import numpy as np

from stylesearch.errors import FormatError
from stylesearch.nn.layers import Conv, Dense, Dropout, Flatten, MaxPool, UpsampleNearest
from stylesearch.nn.network import LayerParams, Network

MAGIC = b"FNNW"
VERSION = 1

_PADDING_CODES = {"same": 0, "valid": 1}
_ACTIVATION_CODES = {"relu": 0, "sigmoid": 1, "linear": 2}
_PADDING_NAMES = {v: k for k, v in _PADDING_CODES.items()}
_ACTIVATION_NAMES = {v: k for k, v in _ACTIVATION_CODES.items()}

_TAGS = {Conv: 1, MaxPool: 2, UpsampleNearest: 3, Flatten: 4, Dense: 5, Dropout: 6}


def _layer_dims(layer):
    if isinstance(layer, Conv):
        return [
            layer.in_channels, layer.out_channels, layer.kernel_h, layer.kernel_w,
            layer.stride, _PADDING_CODES[layer.padding], _ACTIVATION_CODES[layer.activation],
        ]
    if isinstance(layer, MaxPool):
        return [layer.pool_h, layer.pool_w]
    if isinstance(layer, UpsampleNearest):
        return [layer.factor]
    if isinstance(layer, Flatten):
        return []
    if isinstance(layer, Dense):
        return [layer.in_size, layer.out_size, _ACTIVATION_CODES[layer.activation]]
    if isinstance(layer, Dropout):
        return [int(np.float32(layer.rate).view(np.uint32))]
    raise FormatError(f"cannot serialize layer {layer!r}")


def save_network(net: Network, path):
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(net.layers)))
        for layer, params in zip(net.layers, net.params):
            dims = _layer_dims(layer)
            fh.write(struct.pack("<B", _TAGS[type(layer)]))
            fh.write(struct.pack(f"<{len(dims)}I", *dims))
            if params is None:
                fh.write(struct.pack("<Q", 0))
            else:
                w = np.ascontiguousarray(params.weights, dtype="<f4")
                b = np.ascontiguousarray(params.biases, dtype="<f4")
                fh.write(struct.pack("<Q", w.size + b.size))
                fh.write(w.tobytes())
                fh.write(b.tobytes())


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.offset = 0
        self.path = str(path)

    def take(self, n, what):
        if self.offset + n > len(self.data):
            raise FormatError(
                f"{self.path}: truncated reading {what} at offset {self.offset}"
            )
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def u8(self, what):
        return self.take(1, what)[0]

    def u32(self, what):
        return struct.unpack("<I", self.take(4, what))[0]

    def u64(self, what):
        return struct.unpack("<Q", self.take(8, what))[0]

    def f32s(self, n, what):
        raw = self.take(4 * n, what)
        return np.frombuffer(raw, dtype="<f4", count=n).copy()


def load_network(path) -> Network:
    with open(path, "rb") as fh:
        r = _Reader(fh.read(), path)
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise FormatError(f"{r.path}: bad magic {magic!r} at offset 0, expected {MAGIC!r}")
    version = r.u32("version")
    if version != VERSION:
        raise FormatError(f"{r.path}: unsupported version {version} at offset 4")
    n_layers = r.u32("layer count")
    layers, params = [], []
    for i in range(n_layers):
        tag_offset = r.offset
        tag = r.u8(f"layer {i} tag")
        if tag == _TAGS[Conv]:
            d = [r.u32(f"layer {i} conv dims") for _ in range(7)]
            if d[5] not in _PADDING_NAMES or d[6] not in _ACTIVATION_NAMES:
                raise FormatError(f"{r.path}: bad conv codes at offset {tag_offset}")
            layer = Conv(d[0], d[1], d[2], d[3], d[4], _PADDING_NAMES[d[5]], _ACTIVATION_NAMES[d[6]])
            w_shape = (d[2], d[3], d[0], d[1])
            n_bias = d[1]
        elif tag == _TAGS[MaxPool]:
            layer = MaxPool(r.u32(f"layer {i} pool_h"), r.u32(f"layer {i} pool_w"))
            w_shape = None
        elif tag == _TAGS[UpsampleNearest]:
            layer = UpsampleNearest(r.u32(f"layer {i} factor"))
            w_shape = None
        elif tag == _TAGS[Flatten]:
            layer = Flatten()
            w_shape = None
        elif tag == _TAGS[Dense]:
            d = [r.u32(f"layer {i} dense dims") for _ in range(3)]
            if d[2] not in _ACTIVATION_NAMES:
                raise FormatError(f"{r.path}: bad activation code at offset {tag_offset}")
            layer = Dense(d[0], d[1], _ACTIVATION_NAMES[d[2]])
            w_shape = (d[0], d[1])
            n_bias = d[1]
        elif tag == _TAGS[Dropout]:
            bits = r.u32(f"layer {i} dropout rate")
            layer = Dropout(float(np.uint32(bits).view(np.float32)))
            w_shape = None
        else:
            raise FormatError(f"{r.path}: unknown layer tag {tag} at offset {tag_offset}")
        n_params = r.u64(f"layer {i} parameter count")
        if w_shape is None:
            if n_params != 0:
                raise FormatError(
                    f"{r.path}: parameterless layer {i} claims {n_params} parameters "
                    f"at offset {tag_offset}"
                )
            params.append(None)
        else:
            expected = int(np.prod(w_shape)) + n_bias
            if n_params != expected:
                raise FormatError(
                    f"{r.path}: layer {i} parameter count {n_params} != expected {expected} "
                    f"at offset {tag_offset}"
                )
            flat = r.f32s(n_params, f"layer {i} parameters")
            w = flat[: n_params - n_bias].reshape(w_shape)
            b = flat[n_params - n_bias:]
            params.append(LayerParams(w, b))
        layers.append(layer)
    if r.offset != len(r.data):
        raise FormatError(f"{r.path}: {len(r.data) - r.offset} trailing bytes at offset {r.offset}")
    return Network(tuple(layers), params)

from stylesearch.nn.layers import (
    Conv,
    Dense,
    Dropout,
    Flatten,
    LayerSpec,
    MaxPool,
    UpsampleNearest,
)
from stylesearch.nn.network import ForwardRecord, LayerParams, Network, backward, forward, infer, init_network
from stylesearch.nn.adam import OptimizerState, adam_step, init_adam
from stylesearch.nn.weights_io import load_network, save_network

__all__ = [
    "Conv", "Dense", "Dropout", "Flatten", "LayerSpec", "MaxPool", "UpsampleNearest",
    "ForwardRecord", "LayerParams", "Network", "backward", "forward", "infer", "init_network",
    "OptimizerState", "adam_step", "init_adam",
    "load_network", "save_network",
]

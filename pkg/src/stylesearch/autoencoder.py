"""Convolutional autoencoder: a 14-layer stack whose first 7 layers form
the encoder used for visual-search embeddings.

On a 64x64x3 input the encoder bottleneck is 8x8x8; flattened it yields
the 512-dimensional embedding vector. Inputs are resized to 64x64 because
three 2x poolings must land exactly on 8x8; the catalog's native 80x60
frames cannot reach that shape by repeated halving. All embedding
components are nonnegative (relu bottleneck), which is what keeps cosine
scores in [0, 1] downstream.
"""

from dataclasses import dataclass, field

import numpy as np

from stylesearch.errors import ContractError, ShapeError
from stylesearch.nn import Conv, MaxPool, Network, UpsampleNearest, forward, infer, init_network
from stylesearch.nn import functional as F
from stylesearch.nn.adam import adam_step, init_adam
from stylesearch.nn.network import backward
from stylesearch.nn.training import EarlyStopping, minibatches
from stylesearch.data.images import decode_image_u8
from stylesearch.search import write_embeddings

ENCODER_DEPTH = 7
EMBEDDING_DIM = 512

ENCODER_LAYERS = (
    Conv(3, 16, 3, 3, 1, "same", "relu"),
    MaxPool(2, 2),
    Conv(16, 16, 3, 3, 1, "same", "relu"),
    MaxPool(2, 2),
    Conv(16, 8, 3, 3, 1, "same", "relu"),
    MaxPool(2, 2),
    Conv(8, 8, 3, 3, 1, "same", "relu"),
)

DECODER_LAYERS = (
    Conv(8, 8, 3, 3, 1, "same", "relu"),
    UpsampleNearest(2),
    Conv(8, 16, 3, 3, 1, "same", "relu"),
    UpsampleNearest(2),
    Conv(16, 16, 3, 3, 1, "same", "relu"),
    UpsampleNearest(2),
    Conv(16, 3, 3, 3, 1, "same", "sigmoid"),
)

AUTOENCODER_LAYERS = ENCODER_LAYERS + DECODER_LAYERS


@dataclass
class TrainConfig:
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-3
    early_stop_patience: int = 5  # 0 disables early stopping
    shuffle_seed: int = 0


@dataclass
class TrainHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    epochs_run: int = 0
    stopped_early: bool = False


def build_autoencoder(seed=0) -> Network:
    return init_network(AUTOENCODER_LAYERS, seed=seed)


def _as_image_batch(images):
    batch = np.asarray(images, dtype=np.float32)
    if batch.ndim == 3:
        batch = batch[None]
    if batch.ndim != 4 or batch.shape[1:] != (64, 64, 3):
        raise ShapeError(f"autoencoder expects 64x64x3 images, got {batch.shape}")
    return batch


def _mean_reconstruction_loss(net, images, batch_size):
    total = 0.0
    for start in range(0, len(images), batch_size):
        chunk = images[start:start + batch_size]
        out = infer(net, chunk)
        total += F.mse(out, chunk) * len(chunk)
    return total / len(images)


def train_autoencoder(net: Network, train_images, val_images, config: TrainConfig):
    """Self-supervised training: the reconstruction target is the input
    itself. Early-stops on validation mse and restores the best-epoch
    parameters. Returns (net, TrainHistory)."""
    train = _as_image_batch(train_images)
    if train.shape[0] == 0:
        raise ContractError("autoencoder training set is empty")
    val = _as_image_batch(val_images)
    if val.shape[0] == 0:
        raise ContractError("autoencoder validation set is empty")

    rng = np.random.default_rng(config.shuffle_seed)
    state = init_adam(net.params, learning_rate=config.learning_rate)
    stopper = EarlyStopping(config.early_stop_patience)
    best_params = None
    history = TrainHistory()

    for epoch in range(config.epochs):
        epoch_loss = 0.0
        for idx in minibatches(train.shape[0], config.batch_size, rng):
            batch = train[idx]
            rec = forward(net, batch, training=True)
            out = rec.outputs[-1]
            epoch_loss += F.mse(out, batch) * len(idx)
            grads = backward(net, rec, F.mse_grad(out, batch))
            adam_step(net.params, grads, state)
        history.train_loss.append(epoch_loss / train.shape[0])
        val_loss = _mean_reconstruction_loss(net, val, config.batch_size)
        history.val_loss.append(val_loss)
        history.epochs_run = epoch + 1
        improved = val_loss < stopper.best
        stop = stopper.update(val_loss, epoch)
        if improved:
            best_params = net.clone_params()
        if stop:
            history.stopped_early = True
            break
    if best_params is not None:
        net.set_params(best_params)
    return net, history


def _encoder_view(net: Network) -> Network:
    return Network(net.layers[:ENCODER_DEPTH], net.params[:ENCODER_DEPTH])


def encode(net: Network, image) -> np.ndarray:
    """Run the encoder half only and flatten the bottleneck to a vector."""
    bottleneck = infer(_encoder_view(net), _normalize_single(image))
    return bottleneck.reshape(-1)


def encode_batch(net: Network, images) -> np.ndarray:
    batch = _as_image_batch(images)
    return infer(_encoder_view(net), batch).reshape(batch.shape[0], -1)


def _normalize_single(image):
    image = np.asarray(image, dtype=np.float32)
    if image.shape != (64, 64, 3):
        raise ShapeError(f"autoencoder expects a 64x64x3 image, got {image.shape}")
    return image


def reconstruct(net: Network, image) -> np.ndarray:
    return infer(net, _normalize_single(image))


def export_embeddings(net: Network, manifest, out_path, batch_size=64):
    """Encode every manifest record's image and stream the vectors into a
    FEMB file, in manifest record order."""
    ids = [r.id for r in manifest.records]

    def generate():
        for start in range(0, len(ids), batch_size):
            chunk = ids[start:start + batch_size]
            images = np.stack([
                decode_image_u8(manifest.image_path(rid), manifest.target_size)
                for rid in chunk
            ]).astype(np.float32) / 255.0
            vectors = encode_batch(net, images)
            yield from zip(chunk, vectors)

    write_embeddings(out_path, EMBEDDING_DIM, len(ids), generate())
    return len(ids)

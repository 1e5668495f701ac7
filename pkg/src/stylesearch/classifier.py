"""Product classifiers over the catalog's label schemes.

Two modes: a from-scratch CNN that proves the full pipeline at desk
scale, and an embedding-head that trains a small dense network on frozen
feature vectors imported from a FEMB file (the transfer-learning shape:
frozen extractor, trainable head). Training applies the usual
regularization set: training-time-only augmentation, dropout, early
stopping, and reduce-LR-on-plateau.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from stylesearch.errors import ContractError, FormatError, ShapeError
from stylesearch.nn import Conv, Dense, Dropout, Flatten, MaxPool, Network, forward, infer, init_network
from stylesearch.nn import functional as F
from stylesearch.nn.adam import adam_step, init_adam
from stylesearch.nn.network import backward
from stylesearch.nn.training import EarlyStopping, PlateauLR, minibatches
from stylesearch.data.images import augment, decode_image_u8
from stylesearch.search import EmbeddingStore, import_embeddings

SCRATCH_CNN = "scratch_cnn"
EMBEDDING_HEAD = "embedding_head"

HEAD_WIDTH = 256
HEAD_DROPOUT = 0.5


@dataclass(frozen=True)
class ClassifierSpec:
    mode: str
    n_classes: int
    input_dim: int = 512          # embedding_head only
    input_size: tuple = (64, 64)  # scratch_cnn only

    def __post_init__(self):
        if self.mode not in (SCRATCH_CNN, EMBEDDING_HEAD):
            raise ContractError(f"unknown classifier mode {self.mode!r}")
        if self.n_classes < 2:
            raise ContractError(f"need at least 2 classes, got {self.n_classes}")


@dataclass
class FitConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 1e-3
    early_stop_patience: int = 5
    plateau_patience: int = 3
    plateau_factor: float = 0.5
    min_lr: float = 1e-5
    augment: object = None  # AugmentConfig or None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.plateau_factor < 1.0:
            raise ContractError("plateau_factor must lie in (0, 1)")


@dataclass
class FitHistory:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    train_acc: list = field(default_factory=list)
    val_acc: list = field(default_factory=list)
    lr: list = field(default_factory=list)
    epochs_run: int = 0
    stopped_early: bool = False


def build_classifier(spec: ClassifierSpec, seed=0) -> Network:
    if spec.mode == SCRATCH_CNN:
        h, w = spec.input_size
        if h % 8 or w % 8:
            raise ContractError(f"scratch CNN input dims must divide by 8, got {h}x{w}")
        flat = (h // 8) * (w // 8) * 32
        layers = [
            Conv(3, 16, 3, 3, 1, "same", "relu"), MaxPool(2, 2),
            Conv(16, 32, 3, 3, 1, "same", "relu"), MaxPool(2, 2),
            Conv(32, 32, 3, 3, 1, "same", "relu"), MaxPool(2, 2),
            Flatten(),
            Dense(flat, HEAD_WIDTH, "relu"), Dropout(HEAD_DROPOUT),
            Dense(HEAD_WIDTH, spec.n_classes, "linear"),
        ]
    else:
        layers = [
            Dense(spec.input_dim, HEAD_WIDTH, "relu"), Dropout(HEAD_DROPOUT),
            Dense(HEAD_WIDTH, spec.n_classes, "linear"),
        ]
    return init_network(layers, seed=seed)


def predict(net: Network, sample) -> np.ndarray:
    """Class probabilities (float64, vocabulary order) for one image or
    embedding vector; softmax over the network's logits."""
    return F.softmax(infer(net, np.asarray(sample, dtype=np.float32)))


def predict_batch(net: Network, samples) -> np.ndarray:
    return F.softmax(infer(net, np.asarray(samples, dtype=np.float32)))


def _onehot(labels, n_classes):
    out = np.zeros((len(labels), n_classes), dtype=np.float32)
    out[np.arange(len(labels)), labels] = 1.0
    return out


def _eval_logits(net, x, batch_size):
    outs = [infer(net, x[s:s + batch_size]) for s in range(0, len(x), batch_size)]
    return np.concatenate(outs, axis=0)


def _fit(net, train_x, train_y, val_x, val_y, n_classes, config, augment_config=None):
    """Shared epoch loop for both classifier modes.

    train_x/val_x are float32 arrays (images or vectors); augmentation,
    when configured, applies per item to training batches only.
    """
    if len(train_x) == 0 or len(val_x) == 0:
        raise ContractError("training and validation splits must be non-empty")
    rng = np.random.default_rng(config.seed)
    state = init_adam(net.params, learning_rate=config.learning_rate)
    schedule = PlateauLR(config.learning_rate, config.plateau_factor,
                         config.plateau_patience, config.min_lr)
    stopper = EarlyStopping(config.early_stop_patience)
    best_params = None
    history = FitHistory()
    train_y = np.asarray(train_y)
    val_y = np.asarray(val_y)
    val_onehot = _onehot(val_y, n_classes)

    for epoch in range(config.epochs):
        epoch_loss = 0.0
        epoch_hits = 0
        for idx in minibatches(len(train_x), config.batch_size, rng):
            batch = train_x[idx]
            if augment_config is not None:
                batch = np.stack([augment(img, augment_config, rng) for img in batch])
            rec = forward(net, batch, training=True, rng=rng)
            logits = rec.outputs[-1]
            loss, grad = F.softmax_cross_entropy(logits, _onehot(train_y[idx], n_classes))
            epoch_loss += loss * len(idx)
            epoch_hits += int(np.sum(np.argmax(logits, axis=1) == train_y[idx]))
            grads = backward(net, rec, grad.astype(np.float32))
            adam_step(net.params, grads, state)
        history.train_loss.append(epoch_loss / len(train_x))
        history.train_acc.append(epoch_hits / len(train_x))

        val_logits = _eval_logits(net, val_x, config.batch_size)
        val_loss, _ = F.softmax_cross_entropy(val_logits, val_onehot)
        history.val_loss.append(val_loss)
        history.val_acc.append(float(np.mean(np.argmax(val_logits, axis=1) == val_y)))
        history.lr.append(state.learning_rate)
        history.epochs_run = epoch + 1

        improved = val_loss < stopper.best
        stop = stopper.update(val_loss, epoch)
        if improved:
            best_params = net.clone_params()
        state.learning_rate = schedule.update(val_loss)
        if stop:
            history.stopped_early = True
            break
    if best_params is not None:
        net.set_params(best_params)
    return net, history


def load_split_images(manifest, split_name):
    """Decode one split into a uint8 batch plus integer labels, in split
    order. uint8 halves memory four-fold; divide by 255 before use."""
    ids = manifest.split_ids(split_name)
    if not ids:
        raise ContractError(f"manifest split {split_name!r} is empty")
    images = np.stack([
        decode_image_u8(manifest.image_path(rid), manifest.target_size) for rid in ids
    ])
    labels = np.array([manifest.label_index(rid) for rid in ids], dtype=np.int64)
    return images, labels


def train_classifier(net: Network, manifest, config: FitConfig):
    """Train a scratch CNN on the manifest's train split, validating per
    epoch on the validation split. Returns (net, FitHistory)."""
    train_u8, train_y = load_split_images(manifest, "train")
    val_u8, val_y = load_split_images(manifest, "validation")
    train_x = train_u8.astype(np.float32) / 255.0
    val_x = val_u8.astype(np.float32) / 255.0
    return _fit(net, train_x, train_y, val_x, val_y, manifest.n_classes, config,
                augment_config=config.augment)


def _vectors_for(store: EmbeddingStore, ids):
    missing = [rid for rid in ids if rid not in store]
    if missing:
        raise LookupError(f"embedding file has no vector for record id {missing[0]}")
    return np.stack([store.vector(rid) for rid in ids]).astype(np.float32)


def train_embedding_head(embeddings, manifest, config: FitConfig):
    """Train a dense head on frozen per-record feature vectors.

    `embeddings` is a FEMB path or an EmbeddingStore whose ids cover the
    manifest's records (extra ids are ignored). Returns (net, FitHistory).
    """
    store = embeddings if isinstance(embeddings, EmbeddingStore) else import_embeddings(embeddings)
    if store.dimension is None:
        raise FormatError("embedding file is empty")
    train_ids = manifest.split_ids("train")
    val_ids = manifest.split_ids("validation")
    train_x = _vectors_for(store, train_ids)
    val_x = _vectors_for(store, val_ids)
    train_y = np.array([manifest.label_index(r) for r in train_ids], dtype=np.int64)
    val_y = np.array([manifest.label_index(r) for r in val_ids], dtype=np.int64)
    spec = ClassifierSpec(EMBEDDING_HEAD, manifest.n_classes, input_dim=store.dimension)
    net = build_classifier(spec, seed=config.seed)
    return _fit(net, train_x, train_y, val_x, val_y, manifest.n_classes, config)


def write_history_csv(history: FitHistory, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_loss", "train_acc", "val_acc", "lr"])
        for i in range(history.epochs_run):
            writer.writerow([
                i + 1,
                f"{history.train_loss[i]:.6f}", f"{history.val_loss[i]:.6f}",
                f"{history.train_acc[i]:.6f}", f"{history.val_acc[i]:.6f}",
                f"{history.lr[i]:.8f}",
            ])

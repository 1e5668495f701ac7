"""Command line for the offline pipeline and the search service.

    stylesearch prep       catalog CSV + images -> manifest JSON
    stylesearch train-ae   manifest -> autoencoder weights (FNNW)
    stylesearch embed      manifest + weights -> embedding store (FEMB)
    stylesearch train-clf  manifest [+ embeddings] -> classifier weights
    stylesearch evaluate   manifest + weights -> report JSON + text grid
    stylesearch search     query image -> top-k similar products
    stylesearch serve      config JSON -> HTTP service
"""

import json
import sys

import click
import numpy as np

from stylesearch import autoencoder as ae
from stylesearch import classifier as clf
from stylesearch import evaluation
from stylesearch.data import LabelScheme, decode_image
from stylesearch.data.manifest import load_manifest, prepare_manifest, save_manifest
from stylesearch.errors import ContractError, DecodeError, FormatError, ShapeError
from stylesearch.nn import load_network, save_network
from stylesearch.search import import_embeddings, load_store

SCHEME_CHOICES = [s.value for s in LabelScheme]


def _fail(message):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Visual product search and classification over a fashion catalog."""


@main.command()
@click.option("--styles", required=True, type=click.Path(exists=True, dir_okay=False),
              help="catalog metadata CSV")
@click.option("--images", required=True, type=click.Path(exists=True, file_okay=False),
              help="directory of {id}.jpg files")
@click.option("--scheme", required=True, type=click.Choice(SCHEME_CHOICES))
@click.option("--min-class-size", default=500, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="manifest path")
def prep(styles, images, scheme, min_class_size, seed, out):
    """Build a dataset manifest: match images, filter small classes, split."""
    try:
        manifest = prepare_manifest(styles, images, LabelScheme(scheme),
                                    min_class_size=min_class_size, seed=seed)
    except (FormatError, ContractError, OSError) as exc:
        _fail(exc)
    save_manifest(manifest, out)
    click.echo(f"records: {len(manifest.records)}")
    click.echo(f"classes: {manifest.n_classes}")
    click.echo(f"skipped_rows: {manifest.skipped_rows}")
    click.echo(f"splits: train={len(manifest.splits.train)} "
               f"validation={len(manifest.splits.validation)} test={len(manifest.splits.test)}")
    click.echo(f"manifest written to {out}")


def _load_split_tensors(manifest, split):
    images, _ = clf.load_split_images(manifest, split)
    return images.astype(np.float32) / 255.0


@main.command("train-ae")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="weights path")
@click.option("--epochs", default=50, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--lr", default=1e-3, show_default=True)
@click.option("--patience", default=5, show_default=True, help="early stop patience; 0 disables")
@click.option("--seed", default=0, show_default=True)
@click.option("--limit", default=0, show_default=True,
              help="train on at most this many images (0 = all)")
def train_ae(manifest_path, out, epochs, batch_size, lr, patience, seed, limit):
    """Train the convolutional autoencoder on the manifest's train split."""
    manifest = load_manifest(manifest_path)
    train = _load_split_tensors(manifest, "train")
    val = _load_split_tensors(manifest, "validation")
    if limit:
        train = train[:limit]
        val = val[: max(1, limit // 4)]
    net = ae.build_autoencoder(seed=seed)
    config = ae.TrainConfig(epochs=epochs, batch_size=batch_size, learning_rate=lr,
                            early_stop_patience=patience, shuffle_seed=seed)
    try:
        net, history = ae.train_autoencoder(net, train, val, config)
    except (ContractError, ShapeError) as exc:
        _fail(exc)
    for i in range(history.epochs_run):
        click.echo(f"epoch {i + 1}: train_mse={history.train_loss[i]:.5f} "
                   f"val_mse={history.val_loss[i]:.5f}")
    if history.stopped_early:
        click.echo("stopped early (validation mse plateaued)")
    save_network(net, out)
    click.echo(f"weights written to {out}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--weights", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path(dir_okay=False), help="FEMB path")
def embed(manifest_path, weights, out):
    """Encode every catalog image into the embedding store file."""
    manifest = load_manifest(manifest_path)
    net = load_network(weights)
    try:
        n = ae.export_embeddings(net, manifest, out)
    except (ShapeError, DecodeError) as exc:
        _fail(exc)
    click.echo(f"{n} embeddings written to {out}")


@main.command("train-clf")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--mode", required=True, type=click.Choice(["scratch", "head"]))
@click.option("--embeddings", type=click.Path(exists=True),
              help="FEMB file (required for --mode head)")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--history", "history_path", type=click.Path(dir_okay=False),
              help="write per-epoch metrics CSV here")
@click.option("--epochs", default=30, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--lr", default=1e-3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--augment/--no-augment", "use_augment", default=True, show_default=True,
              help="training-time image augmentation (scratch mode only)")
def train_clf(manifest_path, mode, embeddings, out, history_path, epochs, batch_size,
              lr, seed, use_augment):
    """Train a classifier for the manifest's label scheme."""
    from stylesearch.data import AugmentConfig

    manifest = load_manifest(manifest_path)
    config = clf.FitConfig(epochs=epochs, batch_size=batch_size, learning_rate=lr, seed=seed,
                           augment=AugmentConfig() if (use_augment and mode == "scratch") else None)
    try:
        if mode == "scratch":
            net = clf.build_classifier(
                clf.ClassifierSpec(clf.SCRATCH_CNN, manifest.n_classes,
                                   input_size=manifest.target_size), seed=seed)
            net, history = clf.train_classifier(net, manifest, config)
        else:
            if not embeddings:
                _fail("--mode head requires --embeddings")
            net, history = clf.train_embedding_head(embeddings, manifest, config)
    except (ContractError, ShapeError, FormatError, LookupError, DecodeError) as exc:
        _fail(exc)
    for i in range(history.epochs_run):
        click.echo(f"epoch {i + 1}: loss={history.train_loss[i]:.4f} "
                   f"val_loss={history.val_loss[i]:.4f} val_acc={history.val_acc[i]:.3f} "
                   f"lr={history.lr[i]:.6f}")
    if history.stopped_early:
        click.echo("stopped early (validation loss plateaued)")
    save_network(net, out)
    click.echo(f"weights written to {out}")
    if history_path:
        clf.write_history_csv(history, history_path)
        click.echo(f"history written to {history_path}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--weights", required=True, type=click.Path(exists=True))
@click.option("--mode", default="scratch", type=click.Choice(["scratch", "head"]),
              show_default=True)
@click.option("--embeddings", type=click.Path(exists=True),
              help="FEMB file (required for --mode head)")
@click.option("--split", default="test", type=click.Choice(["test", "validation"]),
              show_default=True)
@click.option("--report", "report_path", required=True, type=click.Path(dir_okay=False))
@click.option("--csv-dir", type=click.Path(file_okay=False),
              help="also write confusion matrices as CSV into this directory")
def evaluate(manifest_path, weights, mode, embeddings, split, report_path, csv_dir):
    """Evaluate a trained classifier on a held-out split."""
    manifest = load_manifest(manifest_path)
    net = load_network(weights)
    ids = manifest.split_ids(split)
    if not ids:
        _fail(f"manifest split {split!r} is empty")
    truth = np.array([manifest.label_index(i) for i in ids])
    try:
        if mode == "scratch":
            images, _ = clf.load_split_images(manifest, split)
            probs = _predict_in_batches(net, images.astype(np.float32) / 255.0)
        else:
            if not embeddings:
                _fail("--mode head requires --embeddings")
            store = import_embeddings(embeddings)
            vectors = np.stack([store.vector(i) for i in ids]).astype(np.float32)
            probs = clf.predict_batch(net, vectors)
    except (ShapeError, FormatError, KeyError, DecodeError) as exc:
        _fail(exc)
    predicted = np.argmax(probs, axis=1)
    report = evaluation.evaluation_report(truth, predicted, manifest.class_vocabulary, probs)
    evaluation.save_report(report, report_path)
    click.echo(f"samples: {report['n_samples']}")
    click.echo(f"accuracy: {report['accuracy']:.4f}")
    click.echo(evaluation.format_matrix_grid(report["confusion_normalized"],
                                             manifest.class_vocabulary))
    click.echo(f"report written to {report_path}")
    if csv_dir:
        import os

        os.makedirs(csv_dir, exist_ok=True)
        counts_path = os.path.join(csv_dir, "confusion_counts.csv")
        normalized_path = os.path.join(csv_dir, "confusion_normalized.csv")
        evaluation.write_matrix_csv(report["confusion_counts"],
                                    manifest.class_vocabulary, counts_path)
        evaluation.write_matrix_csv(report["confusion_normalized"],
                                    manifest.class_vocabulary, normalized_path)
        click.echo(f"matrices written to {csv_dir}")


def _predict_in_batches(net, images, batch_size=64):
    out = [clf.predict_batch(net, images[s:s + batch_size])
           for s in range(0, len(images), batch_size)]
    return np.concatenate(out, axis=0)


@main.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", default=5, show_default=True)
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--weights", required=True, type=click.Path(exists=True),
              help="autoencoder weights used to embed the query")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True),
              help="adds product metadata to the hit table")
def search(image_path, k, store_path, weights, manifest_path):
    """Find the catalog products most similar to a query image."""
    store = load_store(store_path)
    net = load_network(weights)
    manifest = load_manifest(manifest_path) if manifest_path else None
    target_size = manifest.target_size if manifest else (64, 64)
    try:
        query = ae.encode(net, decode_image(image_path, target_size))
        hits = store.top_k(query, k=k)
    except (DecodeError, ShapeError) as exc:
        _fail(exc)
    click.echo(f"{'rank':>4} {'id':>8} {'score':>8}  label")
    for rank, hit in enumerate(hits, start=1):
        record = manifest.find(hit.id) if manifest else None
        label = " / ".join(filter(None, (record.gender, record.master_category,
                                         record.sub_category, record.article_type))) \
            if record else ""
        click.echo(f"{rank:>4} {hit.id:>8} {hit.score:>8.4f}  {label}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=0, help="override the config's port")
def serve(config_path, host, port):
    """Run the search/classify HTTP service."""
    import logging

    import uvicorn

    from stylesearch.service import create_app, load_service_config

    logging.basicConfig(level=logging.INFO, format="%(message)s")
    try:
        config = load_service_config(config_path)
        app = create_app(config)
    except (FormatError, FileNotFoundError, OSError) as exc:
        _fail(exc)
    uvicorn.run(app, host=host, port=port or config.port, log_level="info")


if __name__ == "__main__":
    main()

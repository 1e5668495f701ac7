#!/usr/bin/env python3
"""End-to-end demo on a synthetic catalog: prep -> train autoencoder ->
export embeddings -> train classifier head -> evaluate -> service config.

    python3 scripts/run_demo_pipeline.py --out demo
    stylesearch serve --config demo/service.json

Takes a couple of minutes on a laptop CPU; shrink --per-class or
--ae-epochs to go faster.
"""

import argparse
import json
import os

import numpy as np

from stylesearch import autoencoder as ae
from stylesearch import classifier as clf
from stylesearch import evaluation
from stylesearch.data import LabelScheme
from stylesearch.data.manifest import prepare_manifest, save_manifest
from stylesearch.data.synthetic import SYNTHETIC_CLASSES, make_catalog
from stylesearch.nn import save_network
from stylesearch.search import import_embeddings


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="working directory for all artifacts")
    parser.add_argument("--per-class", type=int, default=60)
    parser.add_argument("--ae-epochs", type=int, default=6)
    parser.add_argument("--clf-epochs", type=int, default=15)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    catalog_root = os.path.join(args.out, "catalog")

    print("== building synthetic catalog ==")
    csv_path, image_dir, ids = make_catalog(
        catalog_root, per_class=args.per_class, classes=SYNTHETIC_CLASSES, seed=args.seed)
    print(f"{len(ids)} products")

    print("== prep: filter + split ==")
    # synthetic classes are tiny, so the real-catalog default threshold of
    # 500 would drop everything; keep every class
    manifest = prepare_manifest(csv_path, image_dir, LabelScheme.ARTICLE_TYPE,
                                min_class_size=1, seed=args.seed)
    manifest_path = os.path.join(args.out, "manifest.json")
    save_manifest(manifest, manifest_path)
    print(f"{manifest.n_classes} classes, splits "
          f"{len(manifest.splits.train)}/{len(manifest.splits.validation)}/{len(manifest.splits.test)}")

    print("== training autoencoder ==")
    train_u8, _ = clf.load_split_images(manifest, "train")
    val_u8, _ = clf.load_split_images(manifest, "validation")
    net = ae.build_autoencoder(seed=args.seed)
    net, history = ae.train_autoencoder(
        net, train_u8.astype(np.float32) / 255.0, val_u8.astype(np.float32) / 255.0,
        ae.TrainConfig(epochs=args.ae_epochs, shuffle_seed=args.seed))
    print("train mse per epoch:", " ".join(f"{v:.4f}" for v in history.train_loss))
    weights_path = os.path.join(args.out, "autoencoder.fnnw")
    save_network(net, weights_path)

    print("== exporting embeddings ==")
    store_path = os.path.join(args.out, "catalog.femb")
    count = ae.export_embeddings(net, manifest, store_path)
    print(f"{count} embeddings")

    print("== training classifier head on the embeddings ==")
    store = import_embeddings(store_path, expected_dim=ae.EMBEDDING_DIM)
    head, clf_history = clf.train_embedding_head(
        store, manifest, clf.FitConfig(epochs=args.clf_epochs, seed=args.seed))
    print("val accuracy per epoch:", " ".join(f"{v:.3f}" for v in clf_history.val_acc))
    clf_path = os.path.join(args.out, "classifier.fnnw")
    save_network(head, clf_path)

    print("== evaluating on the test split ==")
    test_ids = manifest.split_ids("test")
    vectors = np.stack([store.vector(i) for i in test_ids]).astype(np.float32)
    probs = clf.predict_batch(head, vectors)
    truth = [manifest.label_index(i) for i in test_ids]
    report = evaluation.evaluation_report(truth, np.argmax(probs, axis=1),
                                          manifest.class_vocabulary, probs)
    report_path = os.path.join(args.out, "report.json")
    evaluation.save_report(report, report_path)
    print(f"test accuracy {report['accuracy']:.3f}")
    print(evaluation.format_matrix_grid(report["confusion_normalized"],
                                        manifest.class_vocabulary))

    config_path = os.path.join(args.out, "service.json")
    # the frontend root holds index.html; dist/ (built by `npm run build`
    # in frontend/) sits beside it
    ui_root = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                           "frontend")
    ui_built = os.path.isdir(os.path.join(ui_root, "dist"))
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump({
            "port": 8765,
            "store": os.path.abspath(store_path),
            "autoencoder_weights": os.path.abspath(weights_path),
            "manifest": os.path.abspath(manifest_path),
            "classifiers": {
                "article-type": {
                    "weights": os.path.abspath(clf_path),
                    "manifest": os.path.abspath(manifest_path),
                },
            },
            "default_k": 5,
            "ui_dir": ui_root if ui_built else "",
        }, fh, indent=1)
    print()
    print(f"service config written to {config_path}")
    print(f"next: stylesearch serve --config {config_path}")
    if ui_built:
        print("the browser UI will be served at http://127.0.0.1:8765/")
    else:
        print("build the UI first for a browser client: cd frontend && npm install && npm run build")


if __name__ == "__main__":
    main()

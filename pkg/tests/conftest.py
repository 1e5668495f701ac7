import json

import numpy as np
import pytest

from stylesearch.data import LabelScheme
from stylesearch.data.manifest import prepare_manifest, save_manifest
from stylesearch.data.synthetic import SYNTHETIC_CLASSES, make_catalog


@pytest.fixture(scope="session")
def small_catalog(tmp_path_factory):
    """Synthetic 2-class catalog: 12 watches + 12 casual shoes."""
    root = tmp_path_factory.mktemp("catalog")
    csv_path, image_dir, ids = make_catalog(
        root, per_class=12, classes=SYNTHETIC_CLASSES[:2], seed=3
    )
    return {"root": root, "styles_csv": csv_path, "image_dir": image_dir, "ids": ids}


@pytest.fixture(scope="session")
def small_manifest(small_catalog, tmp_path_factory):
    manifest = prepare_manifest(
        small_catalog["styles_csv"], small_catalog["image_dir"],
        LabelScheme.ARTICLE_TYPE, min_class_size=1, seed=5,
    )
    path = tmp_path_factory.mktemp("manifest") / "manifest.json"
    save_manifest(manifest, path)
    return manifest, path


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def service_artifacts(small_manifest, tmp_path_factory):
    """Everything a running service needs: weights, store, a trained
    embedding-head classifier, and a config file."""
    from stylesearch.autoencoder import build_autoencoder, export_embeddings
    from stylesearch.classifier import FitConfig, train_embedding_head
    from stylesearch.nn import save_network
    from stylesearch.search import import_embeddings

    manifest, manifest_path = small_manifest
    root = tmp_path_factory.mktemp("service")
    net = build_autoencoder(seed=0)
    weights_path = root / "ae.fnnw"
    save_network(net, weights_path)
    store_path = root / "catalog.femb"
    export_embeddings(net, manifest, store_path)

    store = import_embeddings(store_path, expected_dim=512)
    head, _ = train_embedding_head(store, manifest, FitConfig(epochs=8, batch_size=8, seed=0))
    clf_path = root / "clf.fnnw"
    save_network(head, clf_path)

    config_path = root / "service.json"
    config_path.write_text(json.dumps({
        "store": str(store_path),
        "autoencoder_weights": str(weights_path),
        "manifest": str(manifest_path),
        "classifiers": {
            "article-type": {"weights": str(clf_path), "manifest": str(manifest_path)},
        },
        "default_k": 5,
        "max_upload_bytes": 5 * 1024 * 1024,
    }))
    return {
        "root": root,
        "manifest": manifest,
        "manifest_path": manifest_path,
        "weights_path": weights_path,
        "store_path": store_path,
        "clf_path": clf_path,
        "config_path": config_path,
    }

import json

import pytest
from click.testing import CliRunner

from stylesearch.cli import main
from stylesearch.data.manifest import load_manifest


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


class TestPrep:
    def test_writes_manifest_and_reports_counts(self, runner, small_catalog, tmp_path):
        out = tmp_path / "manifest.json"
        result = runner.invoke(main, [
            "prep", "--styles", str(small_catalog["styles_csv"]),
            "--images", str(small_catalog["image_dir"]),
            "--scheme", "article-type", "--min-class-size", "1",
            "--seed", "5", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert "classes: 2" in result.output
        assert "records: 24" in result.output
        manifest = load_manifest(out)
        assert manifest.n_classes == 2

    def test_min_class_size_filters(self, runner, small_catalog, tmp_path):
        out = tmp_path / "manifest.json"
        result = runner.invoke(main, [
            "prep", "--styles", str(small_catalog["styles_csv"]),
            "--images", str(small_catalog["image_dir"]),
            "--scheme", "article-type", "--min-class-size", "500",
            "--out", str(out),
        ])
        # nothing survives a 500-record threshold in a 24-record catalog
        assert result.exit_code == 0
        assert "classes: 0" in result.output

    def test_missing_csv_fails_without_writing(self, runner, small_catalog, tmp_path):
        out = tmp_path / "manifest.json"
        result = runner.invoke(main, [
            "prep", "--styles", str(tmp_path / "absent.csv"),
            "--images", str(small_catalog["image_dir"]),
            "--scheme", "article-type", "--out", str(out),
        ])
        assert result.exit_code != 0
        assert not out.exists()

    def test_unknown_scheme_rejected(self, runner, small_catalog, tmp_path):
        result = runner.invoke(main, [
            "prep", "--styles", str(small_catalog["styles_csv"]),
            "--images", str(small_catalog["image_dir"]),
            "--scheme", "colour", "--out", str(tmp_path / "m.json"),
        ])
        assert result.exit_code != 0


@pytest.fixture(scope="module")
def pipeline(runner, small_manifest, tmp_path_factory):
    """train-ae -> embed -> train-clf (head) through the CLI."""
    _, manifest_path = small_manifest
    root = tmp_path_factory.mktemp("cli-pipeline")
    weights = root / "ae.fnnw"
    result = runner.invoke(main, [
        "train-ae", "--manifest", str(manifest_path), "--out", str(weights),
        "--epochs", "1", "--batch-size", "8", "--patience", "0",
    ])
    assert result.exit_code == 0, result.output
    store = root / "catalog.femb"
    result = runner.invoke(main, [
        "embed", "--manifest", str(manifest_path), "--weights", str(weights),
        "--out", str(store),
    ])
    assert result.exit_code == 0, result.output
    clf = root / "clf.fnnw"
    history = root / "history.csv"
    result = runner.invoke(main, [
        "train-clf", "--manifest", str(manifest_path), "--mode", "head",
        "--embeddings", str(store), "--out", str(clf),
        "--history", str(history), "--epochs", "5", "--batch-size", "8",
    ])
    assert result.exit_code == 0, result.output
    return {"root": root, "manifest_path": manifest_path, "weights": weights,
            "store": store, "clf": clf, "history": history}


class TestPipeline:
    def test_artifacts_exist(self, pipeline):
        for key in ("weights", "store", "clf", "history"):
            assert pipeline[key].exists(), key

    def test_history_has_epochs(self, pipeline):
        lines = pipeline["history"].read_text().strip().splitlines()
        assert lines[0].startswith("epoch,")
        assert len(lines) >= 2

    def test_embed_reports_count(self, runner, pipeline, small_manifest):
        manifest, _ = small_manifest
        from stylesearch.search import load_store

        store = load_store(pipeline["store"])
        assert len(store) == len(manifest.records)

    def test_search_defaults_to_five_rows(self, runner, pipeline, small_manifest):
        manifest, _ = small_manifest
        query = manifest.image_path(manifest.records[0].id)
        result = runner.invoke(main, [
            "search", "--image", query, "--store", str(pipeline["store"]),
            "--weights", str(pipeline["weights"]),
            "--manifest", str(pipeline["manifest_path"]),
        ])
        assert result.exit_code == 0, result.output
        rows = [l for l in result.output.splitlines()[1:] if l.strip()]
        assert len(rows) == 5
        # rank-1 hit is the query product itself
        assert str(manifest.records[0].id) in rows[0]

    def test_search_respects_k(self, runner, pipeline, small_manifest):
        manifest, _ = small_manifest
        query = manifest.image_path(manifest.records[1].id)
        result = runner.invoke(main, [
            "search", "--image", query, "--k", "2", "--store", str(pipeline["store"]),
            "--weights", str(pipeline["weights"]),
        ])
        assert result.exit_code == 0
        rows = [l for l in result.output.splitlines()[1:] if l.strip()]
        assert len(rows) == 2

    def test_evaluate_writes_report_and_grid(self, runner, pipeline, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, [
            "evaluate", "--manifest", str(pipeline["manifest_path"]),
            "--weights", str(pipeline["clf"]), "--mode", "head",
            "--embeddings", str(pipeline["store"]), "--split", "test",
            "--report", str(report_path), "--csv-dir", str(tmp_path / "csv"),
        ])
        assert result.exit_code == 0, result.output
        assert "accuracy:" in result.output
        report = json.loads(report_path.read_text())
        assert 0.0 <= report["accuracy"] <= 1.0
        assert (tmp_path / "csv" / "confusion_counts.csv").exists()
        assert (tmp_path / "csv" / "confusion_normalized.csv").exists()

    def test_train_clf_head_requires_embeddings(self, runner, pipeline, tmp_path):
        result = runner.invoke(main, [
            "train-clf", "--manifest", str(pipeline["manifest_path"]),
            "--mode", "head", "--out", str(tmp_path / "x.fnnw"),
        ])
        assert result.exit_code != 0

import json

import pytest
from fastapi.testclient import TestClient

from stylesearch.service import create_app, load_service_config


@pytest.fixture(scope="module")
def client(service_artifacts):
    config = load_service_config(service_artifacts["config_path"])
    app = create_app(config)
    with TestClient(app) as c:
        yield c


def upload(client, path, **form):
    with open(path, "rb") as fh:
        return client.post("/api/search", files={"image": ("query.jpg", fh, "image/jpeg")},
                           data=form)


def catalog_image(service_artifacts, index=0):
    manifest = service_artifacts["manifest"]
    record = manifest.records[index]
    return record.id, manifest.image_path(record.id)


class TestHealth:
    def test_ok_when_loaded(self, client):
        response = client.get("/api/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_503_before_load(self, service_artifacts):
        config = load_service_config(service_artifacts["config_path"])
        app = create_app(config, defer_load=True)
        with TestClient(app) as c:
            assert c.get("/api/health").status_code == 503
            pid, path = catalog_image(service_artifacts)
            assert upload(c, path).status_code == 503


class TestSearch:
    def test_self_retrieval_rank_one(self, client, service_artifacts):
        pid, path = catalog_image(service_artifacts)
        response = upload(client, path)
        assert response.status_code == 200
        hits = response.json()["hits"]
        assert len(hits) == 5  # default k
        assert hits[0]["id"] == pid
        assert hits[0]["score"] >= 0.999
        assert hits[0]["article_type"]
        assert hits[0]["image_url"].endswith(f"/{pid}/image")

    def test_scores_descending(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts, index=3)
        hits = upload(client, path).json()["hits"]
        scores = [h["score"] for h in hits]
        assert scores == sorted(scores, reverse=True)

    def test_k_parameter(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts)
        hits = upload(client, path, k="3").json()["hits"]
        assert len(hits) == 3

    def test_bad_k_rejected(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts)
        assert upload(client, path, k="0").status_code == 422

    def test_identical_uploads_byte_identical(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts, index=5)
        a = upload(client, path)
        b = upload(client, path)
        assert a.content == b.content

    def test_external_image_returns_finite_scores(self, client, tmp_path):
        import numpy as np
        from PIL import Image

        external = tmp_path / "external.jpg"
        Image.fromarray(
            np.random.default_rng(0).integers(0, 256, (90, 120, 3), dtype=np.uint8)
        ).save(external)
        response = upload(client, external)
        assert response.status_code == 200
        hits = response.json()["hits"]
        assert len(hits) == 5
        assert all(np.isfinite(h["score"]) for h in hits)

    def test_hit_order_equals_store_ranking(self, client, service_artifacts):
        # the service adds metadata but never reorders the index's ranking
        from stylesearch.autoencoder import encode
        from stylesearch.data import decode_image_bytes
        from stylesearch.nn import load_network
        from stylesearch.search import load_store

        _, path = catalog_image(service_artifacts, index=7)
        api_ids = [h["id"] for h in upload(client, path, k="24").json()["hits"]]
        store = load_store(service_artifacts["store_path"])
        net = load_network(service_artifacts["weights_path"])
        query = encode(net, decode_image_bytes(open(path, "rb").read()))
        direct_ids = [h.id for h in store.top_k(query, k=24)]
        assert api_ids == direct_ids

    def test_undecodable_is_422(self, client, tmp_path):
        bad = tmp_path / "bad.jpg"
        bad.write_bytes(b"not an image at all")
        response = upload(client, bad)
        assert response.status_code == 422
        assert response.json()["error"] == "undecodable_image"

    def test_oversize_is_413(self, service_artifacts, tmp_path):
        config = load_service_config(service_artifacts["config_path"])
        config.max_upload_bytes = 100
        app = create_app(config)
        _, path = catalog_image(service_artifacts)
        with TestClient(app) as c:
            assert upload(c, path).status_code == 413


class TestClassify:
    def classify(self, client, path, scheme):
        with open(path, "rb") as fh:
            return client.post("/api/classify",
                               files={"image": ("q.jpg", fh, "image/jpeg")},
                               data={"scheme": scheme})

    def test_probabilities_sum_to_one(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts)
        response = self.classify(client, path, "article-type")
        assert response.status_code == 200
        body = response.json()
        assert abs(sum(body["probabilities"]) - 1.0) < 1e-6
        assert body["label"] in body["classes"]

    def test_label_in_vocabulary(self, client, service_artifacts):
        manifest = service_artifacts["manifest"]
        _, path = catalog_image(service_artifacts, index=2)
        body = self.classify(client, path, "article-type").json()
        assert body["label"] in manifest.class_vocabulary

    def test_deterministic(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts, index=1)
        a = self.classify(client, path, "article-type")
        b = self.classify(client, path, "article-type")
        assert a.content == b.content

    def test_unconfigured_scheme_409(self, client, service_artifacts):
        _, path = catalog_image(service_artifacts)
        assert self.classify(client, path, "sub-category").status_code == 409


class TestProducts:
    def test_known_id_metadata(self, client, service_artifacts):
        pid, _ = catalog_image(service_artifacts)
        response = client.get(f"/api/products/{pid}")
        assert response.status_code == 200
        body = response.json()
        for key in ("gender", "master_category", "sub_category", "article_type", "display_name"):
            assert body[key]

    def test_unknown_id_404(self, client):
        assert client.get("/api/products/999999").status_code == 404

    def test_image_bytes(self, client, service_artifacts):
        pid, path = catalog_image(service_artifacts)
        response = client.get(f"/api/products/{pid}/image")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/jpeg"
        assert response.content == open(path, "rb").read()


class TestReload:
    def test_reload_swaps_snapshot(self, client, service_artifacts):
        response = client.post("/api/admin/reload")
        assert response.status_code == 200
        assert response.json()["status"] == "reloaded"
        pid, path = catalog_image(service_artifacts)
        assert upload(client, path).json()["hits"][0]["id"] == pid


def test_config_missing_key_rejected(tmp_path):
    from stylesearch.errors import FormatError

    bad = tmp_path / "config.json"
    bad.write_text(json.dumps({"store": "x"}))
    with pytest.raises(FormatError, match="missing config key"):
        load_service_config(bad)

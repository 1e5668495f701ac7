"""HTTP service: live visual search and classification over a prepared
catalog (manifest + autoencoder weights + embedding store).

All shared state lives in an immutable Snapshot; POST /api/admin/reload
builds a fresh snapshot from the configured paths and swaps it in
atomically, so requests never observe a half-loaded state. Responses for
identical uploads are byte-identical: inference is deterministic and hits
preserve the store's exact ranking.
"""

import json
import logging
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, UploadFile, File, Form
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse

from stylesearch import autoencoder
from stylesearch.classifier import predict
from stylesearch.data import LabelScheme, decode_image_bytes
from stylesearch.data.manifest import load_manifest
from stylesearch.errors import DecodeError, FormatError
from stylesearch.nn import Dense, load_network
from stylesearch.search import load_store

logger = logging.getLogger("stylesearch.service")

DEFAULT_K = 5
DEFAULT_MAX_UPLOAD = 5 * 1024 * 1024


@dataclass
class ClassifierEntry:
    weights: str
    manifest: str


@dataclass
class ServiceConfig:
    store: str
    autoencoder_weights: str
    manifest: str
    port: int = 8765
    default_k: int = DEFAULT_K
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD
    classifiers: dict = field(default_factory=dict)  # scheme value -> ClassifierEntry
    cors_origins: list = field(default_factory=lambda: ["*"])
    ui_dir: str = ""


def load_service_config(path) -> ServiceConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    try:
        classifiers = {
            scheme: ClassifierEntry(entry["weights"], entry["manifest"])
            for scheme, entry in doc.get("classifiers", {}).items()
        }
        return ServiceConfig(
            store=doc["store"],
            autoencoder_weights=doc["autoencoder_weights"],
            manifest=doc["manifest"],
            port=doc.get("port", 8765),
            default_k=doc.get("default_k", DEFAULT_K),
            max_upload_bytes=doc.get("max_upload_bytes", DEFAULT_MAX_UPLOAD),
            classifiers=classifiers,
            cors_origins=doc.get("cors_origins", ["*"]),
            ui_dir=doc.get("ui_dir", ""),
        )
    except KeyError as exc:
        raise FormatError(f"{path}: missing config key {exc}") from exc


@dataclass
class Snapshot:
    store: object
    encoder: object
    manifest: object
    classifiers: dict  # scheme value -> (net, manifest)


def build_snapshot(config: ServiceConfig) -> Snapshot:
    """Load everything the service needs; raises if any file is missing or
    malformed so startup fails loudly rather than serving 500s."""
    store = load_store(config.store)
    encoder = load_network(config.autoencoder_weights)
    manifest = load_manifest(config.manifest)
    classifiers = {}
    for scheme, entry in config.classifiers.items():
        LabelScheme(scheme)  # validates the name
        classifiers[scheme] = (load_network(entry.weights), load_manifest(entry.manifest))
    return Snapshot(store, encoder, manifest, classifiers)


def _error(status, code, detail):
    return JSONResponse({"error": code, "detail": detail}, status_code=status)


def _hit_payload(snapshot, hit):
    record = snapshot.manifest.find(hit.id)
    payload = {
        "id": hit.id,
        "score": hit.score,
        "gender": record.gender if record else None,
        "master_category": record.master_category if record else None,
        "sub_category": record.sub_category if record else None,
        "article_type": record.article_type if record else None,
        "display_name": record.display_name if record else None,
        "image_url": f"/api/products/{hit.id}/image",
    }
    return payload


def create_app(config: ServiceConfig, defer_load=False) -> FastAPI:
    app = FastAPI(title="stylesearch")
    app.state.config = config
    app.state.snapshot = None if defer_load else build_snapshot(config)

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        logger.info(json.dumps({
            "path": request.url.path,
            "method": request.method,
            "status": response.status_code,
            "latency_ms": round((time.perf_counter() - start) * 1000, 3),
        }))
        return response

    async def read_upload(image: UploadFile):
        data = await image.read()
        if len(data) > config.max_upload_bytes:
            return None, _error(413, "upload_too_large",
                                f"upload exceeds {config.max_upload_bytes} bytes")
        return data, None

    @app.get("/api/health")
    def health():
        if app.state.snapshot is None:
            return _error(503, "loading", "stores are not loaded")
        return {"status": "ok"}

    @app.post("/api/search")
    async def search(image: UploadFile = File(...), k: int | None = Form(default=None)):
        snapshot = app.state.snapshot
        if snapshot is None or snapshot.store is None:
            return _error(503, "store_not_loaded", "embedding store is not loaded")
        data, too_large = await read_upload(image)
        if too_large is not None:
            return too_large
        wanted = config.default_k if k is None else k
        if wanted < 1:
            return _error(422, "bad_k", f"k must be >= 1, got {wanted}")
        try:
            tensor = decode_image_bytes(data, snapshot.manifest.target_size)
        except DecodeError as exc:
            return _error(422, "undecodable_image", str(exc))
        query = autoencoder.encode(snapshot.encoder, tensor)
        hits = snapshot.store.top_k(query, k=wanted)
        return JSONResponse({"hits": [_hit_payload(snapshot, h) for h in hits]})

    @app.post("/api/classify")
    async def classify(image: UploadFile = File(...), scheme: str = Form(...)):
        snapshot = app.state.snapshot
        if snapshot is None:
            return _error(503, "loading", "stores are not loaded")
        if scheme not in snapshot.classifiers:
            return _error(409, "scheme_not_configured",
                          f"no classifier configured for scheme {scheme!r}")
        data, too_large = await read_upload(image)
        if too_large is not None:
            return too_large
        net, clf_manifest = snapshot.classifiers[scheme]
        try:
            tensor = decode_image_bytes(data, clf_manifest.target_size)
        except DecodeError as exc:
            return _error(422, "undecodable_image", str(exc))
        first = net.layers[0]
        if isinstance(first, Dense):
            # embedding-head classifier: the encoder acts as its frozen
            # feature extractor for uploads
            vector = autoencoder.encode(snapshot.encoder, tensor)
            if vector.shape[0] != first.in_size:
                return _error(409, "incompatible_classifier",
                              f"classifier expects {first.in_size}-dim features, "
                              f"encoder produces {vector.shape[0]}")
            probs = predict(net, vector)
        else:
            probs = predict(net, tensor)
        top = int(np.argmax(probs))
        return JSONResponse({
            "label": clf_manifest.class_vocabulary[top],
            "classes": list(clf_manifest.class_vocabulary),
            "probabilities": [float(p) for p in probs],
        })

    @app.get("/api/products/{product_id}")
    def product(product_id: int):
        snapshot = app.state.snapshot
        if snapshot is None:
            return _error(503, "loading", "stores are not loaded")
        record = snapshot.manifest.find(product_id)
        if record is None:
            return _error(404, "unknown_product", f"no product with id {product_id}")
        return {
            "id": record.id,
            "gender": record.gender,
            "master_category": record.master_category,
            "sub_category": record.sub_category,
            "article_type": record.article_type,
            "base_colour": record.base_colour,
            "season": record.season,
            "year": record.year,
            "usage": record.usage,
            "display_name": record.display_name,
            "image_url": f"/api/products/{record.id}/image",
        }

    @app.get("/api/products/{product_id}/image")
    def product_image(product_id: int):
        snapshot = app.state.snapshot
        if snapshot is None:
            return _error(503, "loading", "stores are not loaded")
        if snapshot.manifest.find(product_id) is None:
            return _error(404, "unknown_product", f"no product with id {product_id}")
        path = snapshot.manifest.image_path(product_id)
        import os

        if not os.path.exists(path):
            return _error(404, "missing_image", f"image file for id {product_id} not found")
        return FileResponse(path, media_type="image/jpeg")

    @app.post("/api/admin/reload")
    def reload_snapshot():
        fresh = build_snapshot(app.state.config)
        app.state.snapshot = fresh
        return {"status": "reloaded", "entries": len(fresh.store),
                "products": len(fresh.manifest.records)}

    if config.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app

"""Synthetic catalogs and images for desk-scale runs and tests.

Each synthetic class pairs catalog metadata with a distinct visual motif
(shape + palette) so classifiers have real signal to learn and retrieval
has visually coherent neighborhoods, without shipping any dataset.
"""

import csv
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from stylesearch.data.catalog import EXPECTED_HEADER


@dataclass(frozen=True)
class SyntheticClass:
    name: str
    gender: str
    master_category: str
    sub_category: str
    article_type: str
    background: tuple
    foreground: tuple
    motif: str  # circle | stripes | block | ring


SYNTHETIC_CLASSES = (
    SyntheticClass("watches", "Men", "Accessories", "Watches", "Watches",
                   (235, 233, 226), (40, 44, 70), "circle"),
    SyntheticClass("casual-shoes", "Men", "Footwear", "Shoes", "Casual Shoes",
                   (244, 240, 233), (96, 60, 30), "block"),
    SyntheticClass("tshirts", "Women", "Apparel", "Topwear", "Tshirts",
                   (250, 250, 250), (190, 40, 50), "stripes"),
    SyntheticClass("handbags", "Women", "Accessories", "Bags", "Handbags",
                   (246, 243, 238), (30, 90, 160), "ring"),
)


def _draw_motif(draw, cls, w, h, rng):
    cx = w / 2 + rng.uniform(-0.08, 0.08) * w
    cy = h / 2 + rng.uniform(-0.08, 0.08) * h
    r = min(w, h) * rng.uniform(0.26, 0.36)
    jitter = tuple(int(np.clip(c + rng.integers(-18, 19), 0, 255)) for c in cls.foreground)
    if cls.motif == "circle":
        draw.ellipse([cx - r, cy - r, cx + r, cy + r], fill=jitter)
    elif cls.motif == "block":
        draw.rectangle([cx - 1.3 * r, cy - 0.55 * r, cx + 1.3 * r, cy + 0.55 * r], fill=jitter)
    elif cls.motif == "stripes":
        step = max(3, int(h * 0.12))
        for y in range(int(cy - 1.2 * r), int(cy + 1.2 * r), step):
            draw.rectangle([cx - 1.1 * r, y, cx + 1.1 * r, y + step // 2], fill=jitter)
    elif cls.motif == "ring":
        draw.ellipse([cx - r, cy - r, cx + r, cy + r], outline=jitter,
                     width=max(2, int(r * 0.45)))


def render_product_image(cls: SyntheticClass, rng, size=(80, 60)) -> Image.Image:
    """One catalog-style product shot: flat background, one motif."""
    h, w = size
    img = Image.new("RGB", (w, h), cls.background)
    _draw_motif(ImageDraw.Draw(img), cls, w, h, rng)
    return img


def make_catalog(root, per_class=30, classes=SYNTHETIC_CLASSES, image_size=(80, 60),
                 seed=0, first_id=10001):
    """Write styles.csv + images/*.jpg under `root`.

    Returns (csv_path, image_dir, ids).
    """
    rng = np.random.default_rng(seed)
    image_dir = os.path.join(root, "images")
    os.makedirs(image_dir, exist_ok=True)
    csv_path = os.path.join(root, "styles.csv")
    ids = []
    next_id = first_id
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EXPECTED_HEADER)
        for cls in classes:
            for _ in range(per_class):
                pid = next_id
                next_id += 1
                ids.append(pid)
                img = render_product_image(cls, rng, image_size)
                img.save(os.path.join(image_dir, f"{pid}.jpg"), quality=92)
                writer.writerow([
                    pid, cls.gender, cls.master_category, cls.sub_category,
                    cls.article_type, "Multi", "Fall", "2019", "Casual",
                    f"Sample {cls.name} {pid}",
                ])
    return csv_path, image_dir, ids


def synthetic_tensor_batch(n, seed=0, size=(64, 64)) -> np.ndarray:
    """(n, H, W, 3) float32 batch of smooth gradient-plus-blob images in
    [0, 1]; compressible enough for quick autoencoder runs."""
    h, w = size
    rng = np.random.default_rng(seed)
    ys = np.linspace(0, 1, h)[:, None, None]
    xs = np.linspace(0, 1, w)[None, :, None]
    out = np.empty((n, h, w, 3), dtype=np.float32)
    for i in range(n):
        base = rng.uniform(0.15, 0.85, size=3)
        tilt = rng.uniform(-0.35, 0.35, size=(2, 3))
        img = base + ys * tilt[0] + xs * tilt[1]
        cy, cx = rng.uniform(0.25, 0.75, size=2)
        radius = rng.uniform(0.12, 0.3)
        blob = np.exp(-(((ys - cy) ** 2 + (xs - cx) ** 2) / (2 * radius ** 2)))
        img = img + blob * rng.uniform(-0.5, 0.5, size=3)
        out[i] = np.clip(img, 0.0, 1.0)
    return out

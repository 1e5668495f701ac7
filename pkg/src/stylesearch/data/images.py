"""Image decoding and training-time augmentation.

Images are (H, W, 3) float32 arrays with intensities in [0, 1]
throughout the package. Augmentation is image-only (labels untouched)
and is applied to training items exclusively; fills use edge replication
and interpolation is bilinear.
"""

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from stylesearch.errors import DecodeError

DEFAULT_TARGET_SIZE = (64, 64)


def decode_image_u8(path, target_size=DEFAULT_TARGET_SIZE) -> np.ndarray:
    """decode_image without the final unit-range scaling: (H, W, 3) uint8.

    Used by training loaders to cache whole splits at a quarter of the
    float32 footprint; dividing by 255 recovers decode_image exactly.
    """
    h, w = target_size
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB").resize((w, h), Image.BILINEAR)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(path, str(exc)) from exc
    return np.asarray(rgb, dtype=np.uint8)


def decode_image(path, target_size=DEFAULT_TARGET_SIZE) -> np.ndarray:
    """Decode a JPEG (or anything PIL reads) into an (H, W, 3) unit-range
    tensor, bilinear-resized to target_size. Grayscale sources are
    replicated to three channels."""
    return decode_image_u8(path, target_size).astype(np.float32) / 255.0


def decode_image_bytes(data: bytes, target_size=DEFAULT_TARGET_SIZE) -> np.ndarray:
    """decode_image over an in-memory buffer (service uploads)."""
    import io

    h, w = target_size
    try:
        with Image.open(io.BytesIO(data)) as img:
            rgb = img.convert("RGB").resize((w, h), Image.BILINEAR)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError("<upload>", str(exc)) from exc
    return np.asarray(rgb, dtype=np.float32) / 255.0


@dataclass(frozen=True)
class AugmentConfig:
    rotation_max_deg: float = 15.0
    horizontal_flip_prob: float = 0.5
    shift_fraction: float = 0.1
    zoom_range: float = 0.1

    def __post_init__(self):
        if self.rotation_max_deg < 0:
            raise ValueError("rotation_max_deg must be >= 0")
        if not 0.0 <= self.horizontal_flip_prob <= 1.0:
            raise ValueError("horizontal_flip_prob must lie in [0, 1]")
        if not 0.0 <= self.shift_fraction < 1.0:
            raise ValueError("shift_fraction must lie in [0, 1)")
        if self.zoom_range < 0:
            raise ValueError("zoom_range must be >= 0")


IDENTITY_AUGMENT = AugmentConfig(0.0, 0.0, 0.0, 0.0)


def _affine(image, matrix2, offset2):
    full = np.eye(3)
    full[:2, :2] = matrix2
    offset = np.array([offset2[0], offset2[1], 0.0])
    return ndimage.affine_transform(image, full, offset=offset, order=1, mode="nearest")


def augment(image: np.ndarray, config: AugmentConfig, rng) -> np.ndarray:
    """Random rotation, horizontal flip, shift, and zoom, in that order.

    Output shape equals input shape; values are clamped to [0, 1]. The
    rng draws the same number of samples regardless of configuration, so
    two calls with identical seeds produce identical outputs.
    """
    h, w = image.shape[:2]
    center = np.array([(h - 1) / 2.0, (w - 1) / 2.0])

    angle = rng.uniform(-config.rotation_max_deg, config.rotation_max_deg)
    flip = rng.random() < config.horizontal_flip_prob
    dy = rng.uniform(-config.shift_fraction, config.shift_fraction) * h
    dx = rng.uniform(-config.shift_fraction, config.shift_fraction) * w
    scale = rng.uniform(1.0 - config.zoom_range, 1.0 + config.zoom_range)

    out = image
    if angle != 0.0:
        theta = np.deg2rad(angle)
        rot = np.array([[np.cos(theta), -np.sin(theta)],
                        [np.sin(theta), np.cos(theta)]])
        out = _affine(out, rot, center - rot @ center)
    if flip:
        out = out[:, ::-1, :]
    if dy != 0.0 or dx != 0.0:
        out = _affine(out, np.eye(2), np.array([-dy, -dx]))
    if scale != 1.0:
        mat = np.eye(2) / scale
        out = _affine(out, mat, center - mat @ center)
    return np.clip(out, 0.0, 1.0).astype(image.dtype, copy=False)

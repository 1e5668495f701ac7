from stylesearch.data.catalog import (
    DEFAULT_MIN_CLASS_SIZE,
    EXPECTED_HEADER,
    LabelScheme,
    ProductRecord,
    Splits,
    filter_min_class,
    label_of,
    load_metadata,
    match_images,
    split_dataset,
)
from stylesearch.data.images import (
    DEFAULT_TARGET_SIZE,
    AugmentConfig,
    IDENTITY_AUGMENT,
    augment,
    decode_image,
    decode_image_bytes,
    decode_image_u8,
)
from stylesearch.data.manifest import DatasetManifest, load_manifest, save_manifest

__all__ = [
    "DEFAULT_MIN_CLASS_SIZE", "EXPECTED_HEADER", "LabelScheme", "ProductRecord", "Splits",
    "filter_min_class", "label_of", "load_metadata", "match_images", "split_dataset",
    "DEFAULT_TARGET_SIZE", "AugmentConfig", "IDENTITY_AUGMENT", "augment",
    "decode_image", "decode_image_bytes", "decode_image_u8",
    "DatasetManifest", "load_manifest", "save_manifest",
]

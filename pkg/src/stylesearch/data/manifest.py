"""Dataset manifest: the frozen outcome of prep (filter + split), stored as
JSON so every downstream step (training, embedding, evaluation, serving)
sees the exact same dataset.

Layout:

    {
      "format": "stylesearch.manifest",
      "version": 1,
      "scheme": "article-type",
      "min_class_size": 500,
      "seed": 42,
      "target_size": [64, 64],
      "image_dir": "...",
      "styles_csv": "...",
      "skipped_rows": 0,
      "class_vocabulary": ["..."],
      "splits": {"train": [ids], "validation": [ids], "test": [ids]},
      "records": [{"id": 1, "gender": "...", ...}, ...]
    }
"""

import json
from dataclasses import asdict, dataclass

from stylesearch.errors import FormatError
from stylesearch.data.catalog import (
    DEFAULT_MIN_CLASS_SIZE,
    LabelScheme,
    ProductRecord,
    Splits,
    filter_min_class,
    label_of,
    load_metadata,
    match_images,
    split_dataset,
)

FORMAT_NAME = "stylesearch.manifest"
VERSION = 1

_RECORD_KEYS = ("id", "gender", "master_category", "sub_category", "article_type",
                "base_colour", "season", "year", "usage", "display_name")


@dataclass
class DatasetManifest:
    records: list
    scheme: LabelScheme
    class_vocabulary: list
    splits: Splits
    image_dir: str
    target_size: tuple = (64, 64)
    seed: int = 42
    min_class_size: int = 500
    styles_csv: str = ""
    skipped_rows: int = 0

    def __post_init__(self):
        self._by_id = {r.id: r for r in self.records}
        self._label_index = {label: i for i, label in enumerate(self.class_vocabulary)}

    @property
    def n_classes(self):
        return len(self.class_vocabulary)

    def record(self, record_id) -> ProductRecord:
        return self._by_id[record_id]

    def find(self, record_id):
        """record() that returns None for unknown ids."""
        return self._by_id.get(record_id)

    def label(self, record_id) -> str:
        return label_of(self._by_id[record_id], self.scheme)

    def label_index(self, record_id) -> int:
        return self._label_index[self.label(record_id)]

    def split_ids(self, name):
        return getattr(self.splits, name)

    def image_path(self, record_id) -> str:
        import os

        return os.path.join(self.image_dir, f"{record_id}.jpg")

    def validate(self):
        ids = set(self._by_id)
        split_union = set(self.splits.train) | set(self.splits.validation) | set(self.splits.test)
        overlap = (
            set(self.splits.train) & set(self.splits.validation)
            or set(self.splits.train) & set(self.splits.test)
            or set(self.splits.validation) & set(self.splits.test)
        )
        if overlap:
            raise FormatError(f"manifest splits overlap on ids {sorted(overlap)[:5]}")
        if split_union != ids:
            raise FormatError("manifest splits do not partition the record ids")
        for r in self.records:
            if label_of(r, self.scheme) not in self._label_index:
                raise FormatError(f"record {r.id} label not in class vocabulary")


def prepare_manifest(styles_csv, image_dir, scheme: LabelScheme,
                     min_class_size=DEFAULT_MIN_CLASS_SIZE, seed=42,
                     target_size=(64, 64)) -> DatasetManifest:
    """The full prep pipeline: load the CSV, keep records with images,
    drop small classes, and split. Returns a validated manifest."""
    records, skipped = load_metadata(styles_csv)
    records = match_images(records, image_dir)
    records, vocabulary = filter_min_class(records, scheme, min_class_size)
    splits = split_dataset(records, scheme, seed=seed)
    manifest = DatasetManifest(
        records=records,
        scheme=scheme,
        class_vocabulary=vocabulary,
        splits=splits,
        image_dir=str(image_dir),
        target_size=tuple(target_size),
        seed=seed,
        min_class_size=min_class_size,
        styles_csv=str(styles_csv),
        skipped_rows=skipped,
    )
    manifest.validate()
    return manifest


def save_manifest(manifest: DatasetManifest, path):
    doc = {
        "format": FORMAT_NAME,
        "version": VERSION,
        "scheme": manifest.scheme.value,
        "min_class_size": manifest.min_class_size,
        "seed": manifest.seed,
        "target_size": list(manifest.target_size),
        "image_dir": str(manifest.image_dir),
        "styles_csv": str(manifest.styles_csv),
        "skipped_rows": manifest.skipped_rows,
        "class_vocabulary": list(manifest.class_vocabulary),
        "splits": manifest.splits.as_dict(),
        "records": [asdict(r) for r in manifest.records],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)


def load_manifest(path) -> DatasetManifest:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    if doc.get("format") != FORMAT_NAME:
        raise FormatError(f"{path}: not a manifest file (format={doc.get('format')!r})")
    if doc.get("version") != VERSION:
        raise FormatError(f"{path}: unsupported manifest version {doc.get('version')!r}")
    try:
        records = [ProductRecord(**{k: r[k] for k in _RECORD_KEYS}) for r in doc["records"]]
        splits = Splits(
            tuple(doc["splits"]["train"]),
            tuple(doc["splits"]["validation"]),
            tuple(doc["splits"]["test"]),
        )
        manifest = DatasetManifest(
            records=records,
            scheme=LabelScheme(doc["scheme"]),
            class_vocabulary=list(doc["class_vocabulary"]),
            splits=splits,
            image_dir=doc["image_dir"],
            target_size=tuple(doc["target_size"]),
            seed=doc["seed"],
            min_class_size=doc["min_class_size"],
            styles_csv=doc.get("styles_csv", ""),
            skipped_rows=doc.get("skipped_rows", 0),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed manifest: {exc}") from exc
    manifest.validate()
    return manifest

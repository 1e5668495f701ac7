"""Catalog ingestion: metadata CSV parsing, image matching, class filtering,
and stratified train/validation/test splits.

The metadata CSV is expected in the fashion-product catalog layout:
a ten-column header (id,gender,masterCategory,subCategory,articleType,
baseColour,season,year,usage,productDisplayName) followed by one row per
product. A handful of rows in the published catalog carry unquoted commas
and parse to the wrong field count; those are skipped, not repaired.
"""

import csv
import os
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np

from stylesearch.errors import ContractError, FormatError

EXPECTED_HEADER = [
    "id", "gender", "masterCategory", "subCategory", "articleType",
    "baseColour", "season", "year", "usage", "productDisplayName",
]

DEFAULT_MIN_CLASS_SIZE = 500
GENDER_MASTER_SEPARATOR = "-"


@dataclass(frozen=True)
class ProductRecord:
    id: int
    gender: str
    master_category: str
    sub_category: str
    article_type: str
    base_colour: str = ""
    season: str = ""
    year: str = ""
    usage: str = ""
    display_name: str = ""


class LabelScheme(Enum):
    GENDER_MASTER = "gender-master"
    SUB_CATEGORY = "sub-category"
    ARTICLE_TYPE = "article-type"


def label_of(record: ProductRecord, scheme: LabelScheme) -> str:
    """The record's class label under a scheme; empty if any part is missing."""
    if scheme is LabelScheme.GENDER_MASTER:
        if not record.gender or not record.master_category:
            return ""
        return record.gender + GENDER_MASTER_SEPARATOR + record.master_category
    if scheme is LabelScheme.SUB_CATEGORY:
        return record.sub_category
    return record.article_type


def load_metadata(csv_path):
    """Parse the catalog CSV.

    Returns (records, skipped) where skipped counts rows whose field count
    differs from the header (or whose id does not parse as a positive
    integer). Raises FileNotFoundError for a missing file and FormatError
    for a wrong header.
    """
    with open(csv_path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{csv_path}: empty file, expected a header row") from None
        if header != EXPECTED_HEADER:
            raise FormatError(
                f"{csv_path}: unexpected header {header!r}, expected {EXPECTED_HEADER!r}"
            )
        records = []
        skipped = 0
        for row in reader:
            if len(row) != len(EXPECTED_HEADER):
                skipped += 1
                continue
            raw_id = row[0].strip()
            if not raw_id.isdigit() or int(raw_id) < 1:
                skipped += 1
                continue
            records.append(ProductRecord(
                id=int(raw_id),
                gender=row[1].strip(),
                master_category=row[2].strip(),
                sub_category=row[3].strip(),
                article_type=row[4].strip(),
                base_colour=row[5].strip(),
                season=row[6].strip(),
                year=row[7].strip(),
                usage=row[8].strip(),
                display_name=row[9].strip(),
            ))
    return records, skipped


def match_images(records, image_dir):
    """Keep records whose image file `{id}.jpg` exists; order preserved."""
    names = set(os.listdir(image_dir))
    return [r for r in records if f"{r.id}.jpg" in names]


def filter_min_class(records, scheme: LabelScheme, min_count=DEFAULT_MIN_CLASS_SIZE):
    """Drop classes with fewer than min_count records under the scheme.

    Records with an empty label are dropped as unclassifiable. Returns
    (retained records, class vocabulary sorted lexicographically).
    """
    if min_count < 0:
        raise ContractError(f"min_count must be >= 0, got {min_count}")
    labeled = [(r, label_of(r, scheme)) for r in records]
    labeled = [(r, lab) for r, lab in labeled if lab]
    counts = Counter(lab for _, lab in labeled)
    kept_labels = {lab for lab, n in counts.items() if n >= min_count}
    retained = [r for r, lab in labeled if lab in kept_labels]
    return retained, sorted(kept_labels)


@dataclass(frozen=True)
class Splits:
    train: tuple
    validation: tuple
    test: tuple

    def as_dict(self):
        return {"train": list(self.train), "validation": list(self.validation),
                "test": list(self.test)}


def split_dataset(records, scheme: LabelScheme, test_fraction=0.2,
                  val_fraction_of_train=0.2, seed=42) -> Splits:
    """Stratified split: per class, shuffle then carve off
    round(n * test_fraction) for test and round(remaining * val) for
    validation; the rest trains.

    Depends only on the per-class id sets and the seed, not input order.
    """
    if not 0 < test_fraction < 1 or not 0 < val_fraction_of_train < 1:
        raise ContractError("split fractions must lie in (0, 1)")
    by_label = {}
    for r in records:
        by_label.setdefault(label_of(r, scheme), []).append(r.id)
    rng = np.random.default_rng(seed)
    train, val, test = [], [], []
    for label in sorted(by_label):
        ids = sorted(by_label[label])
        if len(ids) < 3:
            raise ContractError(
                f"class {label!r} has {len(ids)} records; need >= 3 to populate all splits"
            )
        ids = list(rng.permutation(ids))
        n_test = round(len(ids) * test_fraction)
        rest = ids[n_test:]
        n_val = round(len(rest) * val_fraction_of_train)
        test.extend(int(i) for i in ids[:n_test])
        val.extend(int(i) for i in rest[:n_val])
        train.extend(int(i) for i in rest[n_val:])
    return Splits(tuple(train), tuple(val), tuple(test))

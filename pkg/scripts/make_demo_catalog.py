#!/usr/bin/env python3
"""Generate a synthetic demo catalog (styles.csv + images/) so the whole
pipeline can run without downloading anything.

    python3 scripts/make_demo_catalog.py --out demo/catalog --per-class 60
"""

import argparse

from stylesearch.data.synthetic import SYNTHETIC_CLASSES, make_catalog


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="catalog directory to create")
    parser.add_argument("--per-class", type=int, default=60)
    parser.add_argument("--classes", type=int, default=len(SYNTHETIC_CLASSES),
                        help=f"how many of the {len(SYNTHETIC_CLASSES)} synthetic classes to use")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    csv_path, image_dir, ids = make_catalog(
        args.out, per_class=args.per_class,
        classes=SYNTHETIC_CLASSES[: args.classes], seed=args.seed,
    )
    print(f"wrote {len(ids)} products")
    print(f"  styles.csv: {csv_path}")
    print(f"  images:     {image_dir}")


if __name__ == "__main__":
    main()

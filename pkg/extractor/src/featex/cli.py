"""Command line for the extractor.

Exit codes: 0 success, 1 configuration error, 2 manifest/image error.
"""

from __future__ import annotations

import argparse
import sys

from .backbones import available_backbones
from .extract import extract
from .manifest import ManifestError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featex",
        description="Extract backbone features from an image manifest into the binary feature format.",
    )
    parser.add_argument("--manifest", required=True, help="CSV of path,label,task_id rows")
    parser.add_argument("--out", required=True, help="output feature file")
    parser.add_argument(
        "--backbone",
        default="vit_l_16",
        choices=available_backbones(),
    )
    parser.add_argument(
        "--weights",
        default="pretrained",
        choices=["pretrained", "none"],
        help="'none' draws random weights under --seed for offline runs",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--num-classes", type=int, default=None)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument(
        "--on-error",
        default="abort",
        choices=["abort", "skip"],
        help="skip unreadable images with a warning instead of aborting",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        summary = extract(
            args.manifest,
            args.backbone,
            args.out,
            weights=args.weights,
            seed=args.seed,
            num_classes=args.num_classes,
            batch_size=args.batch_size,
            on_error=args.on_error,
        )
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ManifestError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {args.out}: {summary['records']} records, "
        f"width {summary['feature_width']}, {summary['skipped']} skipped"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())

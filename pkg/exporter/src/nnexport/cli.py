"""Small front end: train seeded models and export them for counting."""

import argparse
import sys

from .harness import run_experiment


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nnexport",
        description="Train desk-scale digit classifiers and export them as "
        "network JSON for exact region counting.",
    )
    parser.add_argument("--widths", required=True, help="comma-separated hidden widths")
    parser.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9",
                        help="comma-separated training seeds")
    parser.add_argument("--epochs", type=int, default=20)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--count", action="store_true",
                        help="fill the regions column via the counting CLI")
    args = parser.parse_args(argv)
    try:
        widths = tuple(int(w) for w in args.widths.split(","))
        seeds = [int(s) for s in args.seeds.split(",")]
    except ValueError:
        print("error: widths and seeds must be comma-separated integers",
              file=sys.stderr)
        return 1
    try:
        rows, csv_path = run_experiment(
            widths, seeds, args.out_dir, epochs=args.epochs, count=args.count
        )
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for row in rows:
        print(f"seed {row['seed']}: ce={row['ce']} mr={row['mr']}"
              + (f" regions={row['regions']}" if row["regions"] != "" else ""))
    print(f"wrote {csv_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

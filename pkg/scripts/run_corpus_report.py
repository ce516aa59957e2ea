"""Run the pcc-vs-uniform corpus comparison and print a per-image table.

Usage: python scripts/run_corpus_report.py [--qp 22,30] [--corpus corpus/] [--csv out.csv]

Equivalent to ``pcc report`` plus a compact side-by-side view of each image.
"""

import argparse
import sys
from pathlib import Path

from pcc.cli import build_parser, format_csv, report_rows

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qp", default="22")
    ap.add_argument("--corpus", default=str(ROOT / "corpus"))
    ap.add_argument("--csv")
    opts = ap.parse_args()

    # reuse the CLI's defaults for every coding option
    args = build_parser().parse_args(["report", "--corpus", opts.corpus, "--qp", opts.qp])
    rows = report_rows(Path(opts.corpus), args.qp, args)
    if opts.csv:
        Path(opts.csv).write_text(format_csv(rows))

    pairs = {}
    for row in rows:
        pairs.setdefault((row["iqp"], row["name"]), {})[row["mode"]] = row
    print(f"{'iqp':>3} {'image':<18} {'bpp uni':>8} {'bpp pcc':>8} {'saving':>7} "
          f"{'ssim uni':>8} {'ssim pcc':>8} {'hit %':>6}  mean offsets G/B/R")
    for (iqp, name), p in sorted(pairs.items()):
        u, c = p["uniform"], p["pcc"]
        print(f"{iqp:>3} {name:<18} {u['bpp']:8.3f} {c['bpp']:8.3f} {100 * (1 - c['bpp'] / u['bpp']):6.1f}% "
              f"{u['ssim']:8.4f} {c['ssim']:8.4f} {c['band_hit_rate']:6.1f}  "
              f"{c['mean_off_g']:+.2f}/{c['mean_off_b']:+.2f}/{c['mean_off_r']:+.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 ok, 1 I/O error, 2 usage error, 3 bitstream parse error.
Machine-readable output goes to stdout, human-readable summaries to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bitstream import BitstreamError
from .codec import EncodeResult, EncoderConfig, decode_image, encode
from .colorimetry import DEFAULT_EPSILON, JncdBand
from .image_io import PPMFormatError, read_ppm, write_ppm
from .jncd_control import ControlConfig
from .metrics import evaluate

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3

REPORT_COLUMNS = (
    "name", "mode", "iqp", "bpp", "ssim", "ms_ssim", "psnr",
    "mean_off_g", "mean_off_b", "mean_off_r", "band_hit_rate",
)
MODE_ORDER = ("uniform", "pcc")


class UsageError(Exception):
    pass


def _qp(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= v <= 51:
        raise argparse.ArgumentTypeError(f"QP {v} outside [0, 51]")
    return v


def _qp_list(text: str) -> list[int]:
    return [_qp(t) for t in text.replace(",", " ").split()]


def _epsilon(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError(f"epsilon {v} outside (0, 1)")
    return v


def _non_negative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_coding_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=MODE_ORDER, default="pcc")
    p.add_argument("--cu-size", type=int, choices=(8, 16, 32, 64), default=16)
    p.add_argument("--epsilon", type=_epsilon, default=DEFAULT_EPSILON)
    p.add_argument("--max-passes", type=_non_negative, default=4)
    p.add_argument("--threads", type=_positive, default=None,
                   help="encoder worker threads (default: hardware count; PCC_THREADS overrides)")


def _config(args, iqp: int, mode: str | None = None) -> EncoderConfig:
    control = ControlConfig(JncdBand(args.epsilon), args.max_passes)
    return EncoderConfig(iqp, args.cu_size, mode or args.mode, control, args.threads)


def encode_summary(result: EncodeResult) -> dict:
    h = result.stream.header
    adjustments = [a for a in result.adjustments if a is not None]
    offsets = np.array([rec.offsets for rec in result.stream.records], dtype=np.float64)
    mean = offsets.mean(axis=0)
    hit = 100.0 * sum(a.in_band for a in adjustments) / len(adjustments) if adjustments else None
    return {
        "width": h.width,
        "height": h.height,
        "bit_depth": h.bit_depth,
        "mode": "pcc" if h.mode else "uniform",
        "iqp": h.iqp,
        "cu_size": h.cu_size,
        "cu_count": h.cu_count,
        "bytes": len(result.data),
        "bpp": result.bpp,
        "mean_offsets": {"g": float(mean[0]), "b": float(mean[1]), "r": float(mean[2])},
        "band_hit_rate": hit,
    }


def cmd_encode(args) -> int:
    image = read_ppm(args.input)
    result = encode(image, _config(args, args.qp))
    Path(args.output).write_bytes(result.data)
    summary = encode_summary(result)
    print(json.dumps(summary))
    off = summary["mean_offsets"]
    print(
        f"{args.input}: {summary['mode']} iQP {summary['iqp']}, {summary['bytes']} bytes, "
        f"{summary['bpp']:.4f} bpp, mean offsets G {off['g']:+.2f} B {off['b']:+.2f} R {off['r']:+.2f}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_decode(args) -> int:
    data = Path(args.input).read_bytes()
    image = decode_image(data)
    write_ppm(image, args.output)
    print(f"{args.input}: decoded {image.width}x{image.height} {image.bit_depth}-bit", file=sys.stderr)
    return EXIT_OK


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "lossless"
        return f"{v:.6f}"
    return str(v)


def metrics_row(ref, test, data: bytes | None = None) -> dict:
    m = evaluate(ref, test, data)
    return {
        "bpp": m.bpp,
        "ssim": m.ssim,
        "ms_ssim": m.ms_ssim,
        "psnr": m.psnr.mean,
        "psnr_g": m.psnr.g,
        "psnr_b": m.psnr.b,
        "psnr_r": m.psnr.r,
    }


def cmd_metrics(args) -> int:
    ref = read_ppm(args.ref)
    test = read_ppm(args.test)
    data = Path(args.stream).read_bytes() if args.stream else None
    row = metrics_row(ref, test, data)
    print(json.dumps({k: (None if v is None else ("lossless" if math.isinf(v) else v)) for k, v in row.items()}))
    return EXIT_OK


def report_rows(corpus: Path, qps: list[int], args) -> list[dict]:
    paths = sorted(corpus.glob("*.ppm"))
    if not paths:
        raise FileNotFoundError(f"no .ppm files in {corpus}")
    rows = []
    for path in paths:
        image = read_ppm(path)
        for iqp in qps:
            for mode in MODE_ORDER:
                result = encode(image, _config(args, iqp, mode))
                summary = encode_summary(result)
                m = metrics_row(image, result.recon, result.data)
                rows.append({
                    "name": path.stem,
                    "mode": mode,
                    "iqp": iqp,
                    "bpp": m["bpp"],
                    "ssim": m["ssim"],
                    "ms_ssim": m["ms_ssim"],
                    "psnr": m["psnr"],
                    "mean_off_g": summary["mean_offsets"]["g"],
                    "mean_off_b": summary["mean_offsets"]["b"],
                    "mean_off_r": summary["mean_offsets"]["r"],
                    "band_hit_rate": summary["band_hit_rate"],
                })
    return rows


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def cmd_report(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {corpus}")
    rows = report_rows(corpus, args.qp, args)
    text = format_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    for iqp in args.qp:
        pairs = {}
        for row in rows:
            if row["iqp"] == iqp:
                pairs.setdefault(row["name"], {})[row["mode"]] = row
        wins = sum(p["pcc"]["bpp"] < p["uniform"]["bpp"] for p in pairs.values())
        saving = np.mean([1 - p["pcc"]["bpp"] / p["uniform"]["bpp"] for p in pairs.values()])
        print(
            f"iQP {iqp}: pcc smaller on {wins}/{len(pairs)} images, mean BPP saving {100 * saving:.1f}%",
            file=sys.stderr,
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcc", description="Perceptual color compression codec")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a PPM image")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--qp", type=_qp, required=True)
    _add_coding_args(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a stream to PPM")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("metrics", help="compare two PPM images")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--stream", help="stream whose size gives the bpp column")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="pcc vs uniform over a directory of PPM images")
    p.add_argument("--corpus", required=True)
    p.add_argument("--qp", type=_qp_list, required=True, help="comma-separated iQP list")
    p.add_argument("--output", help="CSV path (default: stdout)")
    _add_coding_args(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except BitstreamError as e:
        print(f"pcc: bitstream error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, PPMFormatError) as e:
        print(f"pcc: I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"pcc: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

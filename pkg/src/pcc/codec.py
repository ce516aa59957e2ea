"""Encode and decode pipelines.

Images are split into a fixed grid of square CUs in raster order. Each CU's
G, B and R blocks are centered, DCT-transformed and quantized with their own
QP; there is no spatial prediction, so CUs are coded independently. The same
reconstruction routine serves the PCC trial loop, the encoder's final
reconstruction and the decoder, which keeps the decoder drift-free.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bitstream import (
    CU_SIZES,
    MODES,
    CuRecord,
    PccBitstream,
    StreamHeader,
    encode_cu_record,
    read_stream,
    write_stream,
)
from .image_io import ImagePlanar
from .jncd_control import AdjustResult, ControlConfig, CuView, pcc_adjust
from .quant import QP_MAX, QP_MIN, QpState, dequantize_block, qstep_from_qp, quantize_block
from .transform import center_offset, forward_dct2d, inverse_dct2d


@dataclass(frozen=True)
class EncoderConfig:
    iqp: int
    cu_size: int = 16
    mode: str = "pcc"
    control: ControlConfig = field(default_factory=ControlConfig)
    threads: int | None = None  # None: hardware count

    def __post_init__(self):
        if not QP_MIN <= self.iqp <= QP_MAX:
            raise ValueError(f"iqp {self.iqp} outside [{QP_MIN}, {QP_MAX}]")
        if self.cu_size not in CU_SIZES:
            raise ValueError(f"cu_size {self.cu_size} not in {CU_SIZES}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {sorted(MODES)}, got {self.mode!r}")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be positive")


@dataclass
class EncodeResult:
    stream: PccBitstream
    data: bytes
    recon: ImagePlanar
    adjustments: list[AdjustResult | None]

    @property
    def bpp(self) -> float:
        return 8 * len(self.data) / (self.stream.header.width * self.stream.header.height)


def reconstruct_block(levels: np.ndarray, step: float, bit_depth: int) -> np.ndarray:
    """Dequantize, inverse transform, re-center, round half-up and clamp."""
    rec = inverse_dct2d(dequantize_block(levels, step)) + center_offset(bit_depth)
    return np.clip(np.floor(rec + 0.5), 0, (1 << bit_depth) - 1).astype(np.int32)


def cu_grid(width: int, height: int, n: int) -> list[tuple[int, int]]:
    """CU origins (x, y) in raster order."""
    return [(x, y) for y in range(0, height, n) for x in range(0, width, n)]


def extract_cu(image: ImagePlanar, origin: tuple[int, int], n: int) -> CuView:
    x, y = origin
    w = min(n, image.width - x)
    h = min(n, image.height - y)
    block = image.planes[:, y : y + h, x : x + w]
    if (h, w) != (n, n):
        block = np.pad(block, ((0, 0), (0, n - h), (0, n - w)), mode="edge")
    mask = np.zeros((n, n), dtype=bool)
    mask[:h, :w] = True
    return CuView(origin, n, image.bit_depth, np.ascontiguousarray(block), mask)


class CuCoder:
    """Transform once, then quantize/reconstruct any channel at any QP (cached)."""

    def __init__(self, cu: CuView):
        self.cu = cu
        center = center_offset(cu.bit_depth)
        self.coeffs = [forward_dct2d(cu.raw[c] - center) for c in range(3)]
        self._cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def code(self, channel: int, qp: int) -> tuple[np.ndarray, np.ndarray]:
        key = (channel, qp)
        hit = self._cache.get(key)
        if hit is None:
            step = qstep_from_qp(qp)
            levels = quantize_block(self.coeffs[channel], step)
            hit = (levels, reconstruct_block(levels, step, self.cu.bit_depth))
            self._cache[key] = hit
        return hit

    def recon(self, state: QpState) -> np.ndarray:
        return np.stack([self.code(c, q)[1] for c, q in enumerate(state.qps)])

    def levels(self, state: QpState) -> np.ndarray:
        return np.stack([self.code(c, q)[0] for c, q in enumerate(state.qps)])


def _encode_cu(image: ImagePlanar, origin: tuple[int, int], cfg: EncoderConfig):
    cu = extract_cu(image, origin, cfg.cu_size)
    coder = CuCoder(cu)
    adj = None
    state = QpState(cfg.iqp)
    if cfg.mode == "pcc":
        adj = pcc_adjust(cu, cfg.iqp, cfg.control, coder.recon)
        state = adj.state
    rec = CuRecord(state.effective_offsets, coder.levels(state))
    cu.recon = coder.recon(state)
    return rec, encode_cu_record(rec), cu.recon, adj


def resolve_threads(threads: int | None) -> int:
    env = os.environ.get("PCC_THREADS")
    if env:
        return max(1, int(env))
    if threads:
        return threads
    return os.cpu_count() or 1


def encode(image: ImagePlanar, cfg: EncoderConfig) -> EncodeResult:
    n = cfg.cu_size
    origins = cu_grid(image.width, image.height, n)
    workers = resolve_threads(cfg.threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda o: _encode_cu(image, o, cfg), origins))
    else:
        results = [_encode_cu(image, o, cfg) for o in origins]

    header = StreamHeader(image.width, image.height, image.bit_depth, n, cfg.iqp, MODES[cfg.mode])
    stream = PccBitstream(header, [r[0] for r in results])
    data = write_stream(stream, record_bits=[r[1] for r in results])
    recon = _assemble(image.width, image.height, image.bit_depth, n, origins, [r[2] for r in results])
    return EncodeResult(stream, data, recon, [r[3] for r in results])


def encode_image(image: ImagePlanar, cfg: EncoderConfig) -> PccBitstream:
    return encode(image, cfg).stream


def _assemble(width, height, bit_depth, n, origins, blocks) -> ImagePlanar:
    planes = np.zeros((3, height, width), dtype=np.int32)
    for (x, y), blk in zip(origins, blocks):
        h = min(n, height - y)
        w = min(n, width - x)
        planes[:, y : y + h, x : x + w] = blk[:, :h, :w]
    return ImagePlanar(width, height, bit_depth, planes)


def decode_image(stream: PccBitstream | bytes) -> ImagePlanar:
    if isinstance(stream, (bytes, bytearray)):
        stream = read_stream(bytes(stream))
    h = stream.header
    n = h.cu_size
    origins = cu_grid(h.width, h.height, n)
    blocks = []
    for rec in stream.records:
        qps = stream.qps(rec)
        blocks.append(
            np.stack([reconstruct_block(rec.levels[c], qstep_from_qp(qps[c]), h.bit_depth) for c in range(3)])
        )
    return _assemble(h.width, h.height, h.bit_depth, n, origins, blocks)

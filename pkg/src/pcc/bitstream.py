"""Bit-exact container for PCC-coded images.

Layout (all multi-byte header fields big-endian)::

    magic    4 bytes  b"PCC1"   (header is 17 bytes in total)
    version  u8       1
    width    u32
    height   u32
    bit_depth u8
    cu_size  u8
    iqp      u8
    mode     u8       0 = uniform, 1 = pcc
    body     bit-packed CU records in raster order, zero-padded to a byte

Each CU record is ``se(off_g) se(off_b) se(off_r)`` followed by the G, B and R
coefficient payloads. A payload is a single ``0`` bit for an all-zero block, or
``1``, ``ue(last)`` and ``se(level)`` for each zigzag position up to ``last``.
See BITSTREAM.md for worked examples.
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass, field

import numpy as np

from .quant import QP_MAX, QP_MIN

MAGIC = b"PCC1"
VERSION = 1
MODE_UNIFORM = 0
MODE_PCC = 1
MODES = {"uniform": MODE_UNIFORM, "pcc": MODE_PCC}

_HEADER = struct.Struct(">4sBIIBBBB")
HEADER_SIZE = _HEADER.size
CU_SIZES = (8, 16, 32, 64)


class BitstreamError(ValueError):
    """Parse failure; ``byte_offset`` locates the problem in the input."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (at byte offset {byte_offset})")
        self.byte_offset = byte_offset


class BadMagicError(BitstreamError):
    pass


class VersionMismatchError(BitstreamError):
    pass


class HeaderError(BitstreamError):
    pass


class TruncatedStreamError(BitstreamError):
    """Ran out of bits while decoding (exp-Golomb underflow)."""


class SizeMismatchError(BitstreamError):
    """Body length disagrees with the CU count implied by the header."""


class InvalidSyntaxError(BitstreamError):
    """A decoded value violates a stream invariant."""


# --- exp-Golomb ---------------------------------------------------------


def ue_encode(v: int) -> str:
    if v < 0:
        raise ValueError(f"ue() needs a non-negative value, got {v}")
    code = bin(v + 1)[2:]
    return "0" * (len(code) - 1) + code


def se_map(v: int) -> int:
    return -2 * v if v <= 0 else 2 * v - 1


def se_unmap(k: int) -> int:
    return (k + 1) // 2 if k & 1 else -(k // 2)


def se_encode(v: int) -> str:
    return ue_encode(se_map(v))


def ue_decode(bits: str, pos: int = 0) -> tuple[int, int]:
    """Decode one ue() code starting at bit ``pos``; returns (value, next_pos)."""
    one = bits.find("1", pos)
    if one < 0:
        raise TruncatedStreamError("unterminated exp-Golomb prefix", pos // 8)
    zeros = one - pos
    end = one + zeros + 1
    if end > len(bits):
        raise TruncatedStreamError("exp-Golomb suffix runs past end of data", len(bits) // 8)
    return int(bits[one:end], 2) - 1, end


def se_decode(bits: str, pos: int = 0) -> tuple[int, int]:
    k, pos = ue_decode(bits, pos)
    return se_unmap(k), pos


class BitWriter:
    def __init__(self):
        self._chunks: list[str] = []

    def bits(self, s: str) -> None:
        self._chunks.append(s)

    def flag(self, v: bool) -> None:
        self._chunks.append("1" if v else "0")

    def ue(self, v: int) -> None:
        self._chunks.append(ue_encode(v))

    def se(self, v: int) -> None:
        self._chunks.append(se_encode(v))

    def getvalue(self) -> str:
        return "".join(self._chunks)

    def to_bytes(self) -> bytes:
        s = self.getvalue()
        s += "0" * (-len(s) % 8)
        return int(s, 2).to_bytes(len(s) // 8, "big") if s else b""


class BitReader:
    def __init__(self, data: bytes, base_offset: int = 0):
        self._bits = bin(int.from_bytes(data, "big"))[2:].zfill(8 * len(data)) if data else ""
        self.pos = 0
        self.base_offset = base_offset

    @classmethod
    def from_bits(cls, bits: str) -> BitReader:
        r = cls(b"")
        r._bits = bits
        return r

    @property
    def byte_offset(self) -> int:
        return self.base_offset + self.pos // 8

    @property
    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def flag(self) -> bool:
        if self.pos >= len(self._bits):
            raise TruncatedStreamError("flag bit past end of data", self.byte_offset)
        v = self._bits[self.pos] == "1"
        self.pos += 1
        return v

    def ue(self) -> int:
        try:
            v, self.pos = ue_decode(self._bits, self.pos)
        except TruncatedStreamError as e:
            raise TruncatedStreamError("exp-Golomb code past end of data", self.byte_offset) from e
        return v

    def se(self) -> int:
        return se_unmap(self.ue())

    def tail(self) -> str:
        return self._bits[self.pos :]


# --- coefficient payloads -------------------------------------------------


@functools.lru_cache(maxsize=None)
def zigzag_order(n: int) -> np.ndarray:
    """Flat indices of an n x n block in JPEG-style zigzag order."""
    def key(idx):
        i, j = divmod(idx, n)
        d = i + j
        return d, (j if d % 2 == 0 else i)

    order = np.array(sorted(range(n * n), key=key), dtype=np.intp)
    order.setflags(write=False)
    return order


def write_cb_levels(w: BitWriter, levels: np.ndarray) -> None:
    scan = np.asarray(levels).reshape(-1)[zigzag_order(levels.shape[0])]
    nz = np.flatnonzero(scan)
    if nz.size == 0:
        w.flag(False)
        return
    last = int(nz[-1])
    w.flag(True)
    w.ue(last)
    for v in scan[: last + 1].tolist():
        w.se(v)


def read_cb_levels(r: BitReader, n: int) -> np.ndarray:
    levels = np.zeros(n * n, dtype=np.int64)
    if r.flag():
        last = r.ue()
        if last >= n * n:
            raise InvalidSyntaxError(f"last significant index {last} exceeds {n * n - 1}", r.byte_offset)
        order = zigzag_order(n)
        levels[order[: last + 1]] = [r.se() for _ in range(last + 1)]
    return levels.reshape(n, n)


def encode_cb_levels(levels: np.ndarray) -> str:
    w = BitWriter()
    write_cb_levels(w, np.asarray(levels))
    return w.getvalue()


def decode_cb_levels(bits: str, n: int) -> np.ndarray:
    r = BitReader.from_bits(bits)
    levels = read_cb_levels(r, n)
    if r.remaining:
        raise SizeMismatchError(f"{r.remaining} unused bits after block payload", r.byte_offset)
    return levels


# --- container --------------------------------------------------------------


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    bit_depth: int
    cu_size: int
    iqp: int
    mode: int
    version: int = VERSION

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"width and height must be at least 1, got {self.width}x{self.height}")
        if self.mode not in (MODE_UNIFORM, MODE_PCC):
            raise ValueError(f"unknown mode {self.mode}")
        if self.cu_size not in CU_SIZES:
            raise ValueError(f"unsupported CU size {self.cu_size}")
        if self.bit_depth not in (8, 10):
            raise ValueError(f"unsupported bit depth {self.bit_depth}")
        if not QP_MIN <= self.iqp <= QP_MAX:
            raise ValueError(f"iQP {self.iqp} outside [{QP_MIN}, {QP_MAX}]")

    @property
    def cus_x(self) -> int:
        return -(-self.width // self.cu_size)

    @property
    def cus_y(self) -> int:
        return -(-self.height // self.cu_size)

    @property
    def cu_count(self) -> int:
        return self.cus_x * self.cus_y

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC, self.version, self.width, self.height,
            self.bit_depth, self.cu_size, self.iqp, self.mode,
        )


@dataclass
class CuRecord:
    """Signaled (G, B, R) QP offsets and the (3, N, N) level blocks of one CU."""

    offsets: tuple[int, int, int]
    levels: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, CuRecord):
            return NotImplemented
        return tuple(self.offsets) == tuple(other.offsets) and np.array_equal(self.levels, other.levels)


@dataclass
class PccBitstream:
    header: StreamHeader
    records: list[CuRecord] = field(default_factory=list)

    def qps(self, record: CuRecord) -> tuple[int, int, int]:
        return tuple(self.header.iqp + o for o in record.offsets)


def write_cu_record(w: BitWriter, rec: CuRecord) -> None:
    for off in rec.offsets:
        w.se(int(off))
    for plane in rec.levels:
        write_cb_levels(w, plane)


def encode_cu_record(rec: CuRecord) -> str:
    w = BitWriter()
    write_cu_record(w, rec)
    return w.getvalue()


def write_stream(stream: PccBitstream, record_bits: list[str] | None = None) -> bytes:
    """Serialize; ``record_bits`` may carry pre-encoded CU records (raster order)."""
    h = stream.header
    if len(stream.records) != h.cu_count:
        raise ValueError(f"{len(stream.records)} CU records for a {h.cu_count}-CU image")
    n = h.cu_size
    w = BitWriter()
    if record_bits is None:
        for rec in stream.records:
            if rec.levels.shape != (3, n, n):
                raise ValueError(f"CU levels shape {rec.levels.shape}, expected (3, {n}, {n})")
            if h.mode == MODE_UNIFORM and any(rec.offsets):
                raise ValueError("uniform-mode records must carry zero offsets")
            write_cu_record(w, rec)
    else:
        if len(record_bits) != h.cu_count:
            raise ValueError("record_bits length does not match CU count")
        for bits in record_bits:
            w.bits(bits)
    return h.pack() + w.to_bytes()


def read_header(data: bytes) -> StreamHeader:
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {bytes(data[:4])!r}, expected {MAGIC!r}", 0)
    if len(data) < HEADER_SIZE:
        raise TruncatedStreamError(f"header needs {HEADER_SIZE} bytes, got {len(data)}", len(data))
    _, version, width, height, bit_depth, cu_size, iqp, mode = _HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}, expected {VERSION}", 4)
    checks = [
        (width >= 1, "width must be at least 1", 5),
        (height >= 1, "height must be at least 1", 9),
        (bit_depth in (8, 10), f"unsupported bit depth {bit_depth}", 13),
        (cu_size in CU_SIZES, f"unsupported CU size {cu_size}", 14),
        (QP_MIN <= iqp <= QP_MAX, f"iQP {iqp} out of range", 15),
        (mode in (MODE_UNIFORM, MODE_PCC), f"unknown mode {mode}", 16),
    ]
    for ok, msg, off in checks:
        if not ok:
            raise HeaderError(msg, off)
    return StreamHeader(width, height, bit_depth, cu_size, iqp, mode, version)


def read_stream(data: bytes) -> PccBitstream:
    h = read_header(data)
    r = BitReader(data[HEADER_SIZE:], base_offset=HEADER_SIZE)
    n = h.cu_size
    records = []
    for _ in range(h.cu_count):
        at = r.byte_offset
        offsets = (r.se(), r.se(), r.se())
        if h.mode == MODE_UNIFORM and any(offsets):
            raise InvalidSyntaxError("nonzero QP offset in a uniform-mode stream", at)
        for off in offsets:
            if not QP_MIN <= h.iqp + off <= QP_MAX:
                raise InvalidSyntaxError(f"offset {off} takes QP outside [{QP_MIN}, {QP_MAX}]", at)
        levels = np.stack([read_cb_levels(r, n) for _ in range(3)])
        records.append(CuRecord(offsets, levels))
    tail = r.tail()
    if len(tail) >= 8:
        raise SizeMismatchError(f"{len(tail) // 8} trailing bytes after the last CU record", r.byte_offset)
    if "1" in tail:
        raise SizeMismatchError("nonzero padding bits after the last CU record", r.byte_offset)
    return PccBitstream(h, records)

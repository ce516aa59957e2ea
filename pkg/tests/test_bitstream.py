
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcc.bitstream import (
    HEADER_SIZE,
    BadMagicError,
    BitReader,
    BitstreamError,
    CuRecord,
    HeaderError,
    InvalidSyntaxError,
    PccBitstream,
    SizeMismatchError,
    StreamHeader,
    TruncatedStreamError,
    VersionMismatchError,
    decode_cb_levels,
    encode_cb_levels,
    read_stream,
    se_decode,
    se_encode,
    ue_decode,
    ue_encode,
    write_stream,
    zigzag_order,
)


def enumerate_ue(v):
    """Exp-Golomb straight from the definition: M zeros, then v+1 in M+1 bits."""
    m = 0
    while (1 << (m + 1)) - 1 <= v:
        m += 1
    return "0" * m + format(v + 1, f"0{m + 1}b")


@pytest.mark.parametrize("v, code", [(0, "1"), (1, "010"), (2, "011"), (3, "00100"), (4, "00101")])
def test_ue_examples(v, code):
    assert ue_encode(v) == code == enumerate_ue(v)


@pytest.mark.parametrize("v, code", [(0, "1"), (1, "010"), (-1, "011"), (2, "00100"), (-2, "00101")])
def test_se_examples(v, code):
    assert se_encode(v) == code


def test_ue_negative_rejected():
    with pytest.raises(ValueError):
        ue_encode(-1)


def test_ue_matches_definition_exhaustively():
    for v in range(1 << 12):
        assert ue_encode(v) == enumerate_ue(v)


def test_prefix_free():
    codes = sorted(ue_encode(v) for v in range(1 << 12))
    # in sorted order a prefix would sit immediately before an extension of itself
    for a, b in zip(codes, codes[1:]):
        assert not b.startswith(a)


@given(st.integers(0, 2**20 - 1))
def test_ue_round_trip(v):
    assert ue_decode(ue_encode(v) + "1") == (v, len(ue_encode(v)))


@given(st.integers(-(2**19), 2**19 - 1))
def test_se_round_trip(v):
    assert se_decode(se_encode(v)) == (v, len(se_encode(v)))


@pytest.mark.parametrize("bits", ["", "0", "000", "001", "00010"])
def test_ue_underflow(bits):
    with pytest.raises(TruncatedStreamError):
        ue_decode(bits)


def test_zigzag_4x4():
    assert zigzag_order(4).tolist() == [0, 1, 4, 8, 5, 2, 3, 6, 9, 12, 13, 10, 7, 11, 14, 15]


@pytest.mark.parametrize("n", [4, 8, 16, 32, 64])
def test_zigzag_is_permutation(n):
    assert sorted(zigzag_order(n).tolist()) == list(range(n * n))


def test_all_zero_block_is_one_bit():
    assert encode_cb_levels(np.zeros((8, 8), int)) == "0"


def test_dc_only_block():
    levels = np.zeros((8, 8), int)
    levels[0, 0] = 5
    # flag, ue(0) last index, se(5) -> ue(9)
    assert encode_cb_levels(levels) == "1" + "1" + "0001010"


def test_block_second_scan_position():
    levels = np.zeros((4, 4), int)
    levels[0, 1] = -1
    assert encode_cb_levels(levels) == "1" + "010" + "1" + "011"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 8, 16, 32]), st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_block_round_trip(n, seed, density):
    rng = np.random.default_rng(seed)
    levels = rng.integers(-300, 301, (n, n)) * (rng.random((n, n)) < density)
    assert np.array_equal(decode_cb_levels(encode_cb_levels(levels), n), levels)


def test_block_index_overflow():
    bits = "1" + ue_encode(64) + "1" * 65
    with pytest.raises(InvalidSyntaxError):
        decode_cb_levels(bits, 8)


def test_block_truncated():
    levels = np.arange(16).reshape(4, 4)
    bits = encode_cb_levels(levels)
    with pytest.raises(TruncatedStreamError):
        decode_cb_levels(bits[:-3], 4)


# --- container ----------------------------------------------------------------


def make_stream(rng, width=20, height=9, cu=8, mode=1, iqp=22):
    h = StreamHeader(width, height, 8, cu, iqp, mode)
    records = []
    for _ in range(h.cu_count):
        offsets = tuple(int(v) for v in rng.integers(-6, 7, 3)) if mode else (0, 0, 0)
        levels = rng.integers(-20, 21, (3, cu, cu)) * (rng.random((3, cu, cu)) < 0.2)
        records.append(CuRecord(offsets, levels))
    return PccBitstream(h, records)


def test_header_layout():
    h = StreamHeader(300, 200, 10, 16, 22, 1)
    data = h.pack()
    assert len(data) == HEADER_SIZE == 17
    assert data == b"PCC1" + bytes([1]) + (300).to_bytes(4, "big") + (200).to_bytes(4, "big") + bytes([10, 16, 22, 1])


def test_single_cu_bytes():
    h = StreamHeader(1, 1, 8, 8, 22, 0)
    levels = np.zeros((3, 8, 8), int)
    levels[0, 0, 0] = 1
    data = write_stream(PccBitstream(h, [CuRecord((0, 0, 0), levels)]))
    # se(0) x3 = 111, G: 1 1 010, B: 0, R: 0 -> 1111 1010 00 -> padded to 2 bytes
    assert data[HEADER_SIZE:] == bytes([0b11111010, 0b00000000])
    parsed = read_stream(data)
    assert parsed.records[0] == CuRecord((0, 0, 0), levels)
    assert write_stream(parsed) == data


@pytest.mark.parametrize("mode", [0, 1])
@pytest.mark.parametrize("seed", range(5))
def test_stream_round_trip_byte_exact(mode, seed):
    rng = np.random.default_rng(seed)
    stream = make_stream(rng, mode=mode)
    data = write_stream(stream)
    parsed = read_stream(data)
    assert parsed.header == stream.header
    assert parsed.records == stream.records
    assert write_stream(parsed) == data


def test_cu_count():
    h = StreamHeader(17, 33, 8, 16, 30, 0)
    assert h.cu_count == 2 * 3


def test_zero_dimension_rejected():
    with pytest.raises(ValueError):
        StreamHeader(0, 5, 8, 8, 22, 0)


def test_bad_magic():
    data = write_stream(make_stream(np.random.default_rng(0)))
    with pytest.raises(BadMagicError):
        read_stream(b"XCC1" + data[4:])


def test_version_mismatch():
    data = bytearray(write_stream(make_stream(np.random.default_rng(0))))
    data[4] = 2
    with pytest.raises(VersionMismatchError) as exc:
        read_stream(bytes(data))
    assert exc.value.byte_offset == 4


@pytest.mark.parametrize("index, value", [(13, 12), (14, 7), (15, 60), (16, 9)])
def test_bad_header_fields(index, value):
    data = bytearray(write_stream(make_stream(np.random.default_rng(0))))
    data[index] = value
    with pytest.raises(HeaderError) as exc:
        read_stream(bytes(data))
    assert exc.value.byte_offset == index


def test_zero_width_in_header():
    data = bytearray(write_stream(make_stream(np.random.default_rng(0))))
    data[5:9] = bytes(4)
    with pytest.raises(HeaderError):
        read_stream(bytes(data))


def test_truncated_body():
    data = write_stream(make_stream(np.random.default_rng(0)))
    with pytest.raises(TruncatedStreamError):
        read_stream(data[:-5])


def test_truncated_header():
    with pytest.raises(TruncatedStreamError):
        read_stream(b"PCC1\x01\x00")


def test_trailing_bytes():
    data = write_stream(make_stream(np.random.default_rng(0)))
    with pytest.raises(SizeMismatchError):
        read_stream(data + b"\x00")


def test_nonzero_padding():
    h = StreamHeader(1, 1, 8, 8, 22, 0)
    data = bytearray(write_stream(PccBitstream(h, [CuRecord((0, 0, 0), np.zeros((3, 8, 8), int))])))
    # body is 111 000 + two padding bits
    data[-1] |= 0b01
    with pytest.raises(SizeMismatchError):
        read_stream(bytes(data))


def test_uniform_stream_with_offset_rejected():
    rng = np.random.default_rng(3)
    stream = make_stream(rng, mode=1)
    stream.records[0] = CuRecord((0, 2, 0), stream.records[0].levels)
    data = bytearray(write_stream(stream))
    data[16] = 0
    with pytest.raises(InvalidSyntaxError):
        read_stream(bytes(data))
    stream.header = StreamHeader(20, 9, 8, 8, 22, 0)
    with pytest.raises(ValueError):
        write_stream(stream)


def test_offset_leaving_qp_range_rejected():
    h = StreamHeader(1, 1, 8, 8, 50, 1)
    data = write_stream(PccBitstream(h, [CuRecord((2, 0, 0), np.zeros((3, 8, 8), int))]))
    with pytest.raises(InvalidSyntaxError):
        read_stream(data)


def test_errors_share_base_class():
    for cls in (BadMagicError, VersionMismatchError, TruncatedStreamError, SizeMismatchError, InvalidSyntaxError):
        assert issubclass(cls, BitstreamError)


def test_reader_flags_past_end():
    r = BitReader(b"\x80")
    assert [r.flag() for _ in range(8)] == [True] + [False] * 7
    with pytest.raises(TruncatedStreamError):
        r.flag()


# --- worked examples in BITSTREAM.md ------------------------------------------


def test_doc_header_example():
    assert StreamHeader(300, 200, 10, 16, 22, 1).pack().hex(" ") == (
        "50 43 43 31 01 00 00 01 2c 00 00 00 c8 0a 10 16 01"
    )


@pytest.mark.parametrize(
    "mode, body, offsets",
    [("uniform", "f8 0c 5c 06 2e 03 14", (0, 0, 0)), ("pcc", "09 02 60 49 81 17 0b e1 90", (9, 19, 18))],
)
def test_doc_flat_patch_example(mode, body, offsets):
    from pcc.codec import EncoderConfig, encode
    from pcc.image_io import ImagePlanar

    res = encode(ImagePlanar(8, 8, 8, np.full((3, 8, 8), 30)), EncoderConfig(22, cu_size=8, mode=mode))
    assert res.data[HEADER_SIZE:].hex(" ") == body
    assert res.stream.records[0].offsets == offsets


def test_doc_zero_run_example():
    levels = np.zeros((3, 8, 8), int)
    levels[0, 0, 0], levels[0, 1, 0], levels[2, 0, 0] = -3, 2, 1
    data = write_stream(PccBitstream(StreamHeader(4, 4, 8, 8, 30, 1), [CuRecord((1, 2, -1), levels)]))
    assert data[HEADER_SIZE:].hex(" ") == "44 76 79 1a"

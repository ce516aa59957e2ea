import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pcc.quant import (
    DEADZONE_OFFSET,
    QpState,
    dequantize_block,
    qp_from_qstep,
    qstep_from_qp,
    quantize_block,
)


@pytest.mark.parametrize("q, step", [(4, 1.0), (10, 2.0), (22, 8.0), (0, 2 ** (-4 / 6)), (51, 2 ** (47 / 6))])
def test_qstep(q, step):
    assert qstep_from_qp(q) == pytest.approx(step, rel=1e-15)


@pytest.mark.parametrize("q", [-1, 52, 100])
def test_qstep_range(q):
    with pytest.raises(ValueError):
        qstep_from_qp(q)


@pytest.mark.parametrize("s, q", [(1.0, 4), (8.0, 22), (2 ** (17 / 6), 21), (1e-9, 0), (1e9, 51)])
def test_qp_from_qstep(s, q):
    assert qp_from_qstep(s) == q


@pytest.mark.parametrize("s", [0.0, -1.0])
def test_qp_from_nonpositive_step(s):
    with pytest.raises(ValueError):
        qp_from_qstep(s)


def test_qp_law():
    for q in range(52):
        assert qp_from_qstep(qstep_from_qp(q)) == q
    for q in range(46):
        assert abs(qstep_from_qp(q + 6) / qstep_from_qp(q) - 2.0) < 1e-12
    steps = [qstep_from_qp(q) for q in range(52)]
    assert all(b > a for a, b in zip(steps, steps[1:]))


def test_offsets_fold_into_qp():
    st_ = QpState(22, off_g=-3, off_b=6, off_r=6)
    assert st_.qps == (19, 28, 28)
    assert st_.qsteps[1] == pytest.approx(2 ** ((22 - 4 + 6) / 6))


def test_offsets_clamp():
    st_ = QpState(48, off_g=1, off_b=10, off_r=-60)
    assert st_.qps == (49, 51, 0)
    assert st_.effective_offsets == (1, 3, -48)
    assert st_.clamped == (False, True, True)


@pytest.mark.parametrize(
    "c, s, level",
    [(0.0, 3.7, 0), (10.0, 1.0, 10), (-5.0, 8.0, 0), (-7.0, 8.0, -1), (5.4, 8.0, 1), (5.3, 8.0, 0)],
)
def test_quantize_examples(c, s, level):
    assert quantize_block(np.array([[c]]), s)[0, 0] == level


@pytest.mark.parametrize("level, s, c", [(0, 5.0, 0.0), (10, 1.0, 10.0), (-3, 8.0, -24.0)])
def test_dequantize_examples(level, s, c):
    assert dequantize_block(np.array([[level]]), s)[0, 0] == c


def test_levels_are_integers(rng):
    levels = quantize_block(rng.normal(0, 100, (8, 8)), 3.3)
    assert np.issubdtype(levels.dtype, np.integer)


finite = st.floats(-1e5, 1e5, allow_nan=False)
steps = st.floats(0.3, 500)


@given(finite, steps)
def test_deadzone_error_bound(c, s):
    rec = dequantize_block(quantize_block(np.array([c]), s), s)[0]
    assert abs(rec - c) <= s * (1 - DEADZONE_OFFSET) * (1 + 1e-12)


@given(finite, steps)
def test_requantization_idempotent(c, s):
    lv = quantize_block(np.array([c]), s)
    assert np.array_equal(quantize_block(dequantize_block(lv, s), s), lv)


@given(finite, steps)
def test_quantizer_is_odd(c, s):
    assert quantize_block(np.array([-c]), s)[0] == -quantize_block(np.array([c]), s)[0]

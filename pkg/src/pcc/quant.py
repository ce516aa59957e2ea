"""QP <-> quantization step mapping and deadzone scalar quantization.

The step doubles every 6 QP: ``step = 2 ** ((qp - 4) / 6)``. Channel offsets
are added to the QP before the exponential map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

QP_MIN = 0
QP_MAX = 51
DEADZONE_OFFSET = 1.0 / 3.0


def clamp_qp(q: int) -> int:
    return min(max(q, QP_MIN), QP_MAX)


def qstep_from_qp(q: int) -> float:
    if not QP_MIN <= q <= QP_MAX or int(q) != q:
        raise ValueError(f"QP {q} outside [{QP_MIN}, {QP_MAX}]")
    return 2.0 ** ((q - 4) / 6.0)


def qp_from_qstep(s: float) -> int:
    if not s > 0:
        raise ValueError(f"quantization step must be positive, got {s}")
    return clamp_qp(math.floor(6.0 * math.log2(s) + 0.5) + 4)


@dataclass(frozen=True)
class QpState:
    """Per-channel QPs relative to the frame-level ``iqp``.

    Offsets are nominal: they keep counting when the effective QP has already
    hit the [0, 51] range limit, and ``q_*`` is the clamped value actually used.
    """

    iqp: int
    off_g: int = 0
    off_b: int = 0
    off_r: int = 0

    def __post_init__(self):
        if not QP_MIN <= self.iqp <= QP_MAX:
            raise ValueError(f"iQP {self.iqp} outside [{QP_MIN}, {QP_MAX}]")

    @property
    def q_g(self) -> int:
        return clamp_qp(self.iqp + self.off_g)

    @property
    def q_b(self) -> int:
        return clamp_qp(self.iqp + self.off_b)

    @property
    def q_r(self) -> int:
        return clamp_qp(self.iqp + self.off_r)

    @property
    def qps(self) -> tuple[int, int, int]:
        """Effective (G, B, R) QPs."""
        return self.q_g, self.q_b, self.q_r

    @property
    def offsets(self) -> tuple[int, int, int]:
        return self.off_g, self.off_b, self.off_r

    @property
    def effective_offsets(self) -> tuple[int, int, int]:
        return tuple(q - self.iqp for q in self.qps)

    @property
    def qsteps(self) -> tuple[float, float, float]:
        return tuple(qstep_from_qp(q) for q in self.qps)

    @property
    def clamped(self) -> tuple[bool, bool, bool]:
        return tuple(q != self.iqp + o for q, o in zip(self.qps, self.offsets))


def quantize_block(coeffs: np.ndarray, s: float) -> np.ndarray:
    """Deadzone quantizer: ``sign(c) * floor(|c| / s + 1/3)``."""
    if not s > 0:
        raise ValueError(f"quantization step must be positive, got {s}")
    coeffs = np.asarray(coeffs, dtype=np.float64)
    mag = np.floor(np.abs(coeffs) / s + DEADZONE_OFFSET)
    return (np.sign(coeffs) * mag).astype(np.int64)


def dequantize_block(levels: np.ndarray, s: float) -> np.ndarray:
    if not s > 0:
        raise ValueError(f"quantization step must be positive, got {s}")
    return np.asarray(levels, dtype=np.float64) * s

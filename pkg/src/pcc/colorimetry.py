"""sRGB (D65) to CIELAB conversion and the CIE 1976 color difference."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

JNCD_THRESHOLD = 2.3
DEFAULT_EPSILON = 0.1

# IEC 61966-2-1 linear sRGB -> XYZ (Y of white = 1).
_RGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)
# White point taken as the image of RGB (1, 1, 1) so that white maps to a = b = 0 exactly.
_WHITE = tuple(sum(row) for row in _RGB_TO_XYZ)

_LAB_EPS = 216 / 24389
_LAB_KAPPA = 24389 / 27


class LabColor(NamedTuple):
    L: float
    a: float
    b: float


class Jncd(enum.Enum):
    BELOW = "below"
    WITHIN = "within"
    ABOVE = "above"


@dataclass(frozen=True)
class JncdBand:
    """Acceptance band ``[threshold - epsilon, threshold + epsilon]``."""

    epsilon: float = DEFAULT_EPSILON
    threshold: float = JNCD_THRESHOLD

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.threshold != JNCD_THRESHOLD:
            raise ValueError(f"threshold is fixed at {JNCD_THRESHOLD}")

    @property
    def low(self) -> float:
        return self.threshold - self.epsilon

    @property
    def high(self) -> float:
        return self.threshold + self.epsilon


def srgb_to_linear(v: float) -> float:
    if v <= 0.04045:
        return v / 12.92
    return ((v + 0.055) / 1.055) ** 2.4


def _lab_f(t: float) -> float:
    if t > _LAB_EPS:
        return t ** (1.0 / 3.0)
    return (_LAB_KAPPA * t + 16.0) / 116.0


def rgb_to_lab(r: int, g: int, b: int, bit_depth: int = 8) -> LabColor:
    top = (1 << bit_depth) - 1
    for name, v in (("r", r), ("g", g), ("b", b)):
        if not 0 <= v <= top:
            raise ValueError(f"{name}={v} outside [0, {top}] for {bit_depth}-bit samples")
    lin = [srgb_to_linear(v / top) for v in (r, g, b)]
    x, y, z = (sum(m * c for m, c in zip(row, lin)) for row in _RGB_TO_XYZ)
    fx = _lab_f(x / _WHITE[0])
    fy = _lab_f(y / _WHITE[1])
    fz = _lab_f(z / _WHITE[2])
    return LabColor(116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def delta_e_ab(c1: LabColor, c2: LabColor) -> float:
    # hypot scales internally, so tiny but nonzero differences do not underflow to 0
    return math.hypot(c2[0] - c1[0], c2[1] - c1[1], c2[2] - c1[2])


def classify_jncd(delta_e: float, band: JncdBand) -> Jncd:
    if delta_e < band.low:
        return Jncd.BELOW
    if delta_e <= band.high:
        return Jncd.WITHIN
    return Jncd.ABOVE

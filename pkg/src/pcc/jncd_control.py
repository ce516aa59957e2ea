"""Per-CU perceptual QP search against the CIELAB JNCD threshold.

Each coding unit is scored by the color difference between the rounded mean
(R, G, B) of its raw blocks and the rounded mean of its reconstruction. When
that difference sits below the JNCD band, QPs are raised one unit at a time in
perceptual-importance order (B, then R, then G); when above, they are lowered
in the reverse order (G, then R, then B). Every unit step triggers a trial
reconstruction and a fresh color-difference check.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np

from .colorimetry import JncdBand, Jncd, classify_jncd, delta_e_ab, rgb_to_lab
from .image_io import B, G, R
from .quant import QP_MAX, QP_MIN, QpState

# (channel, per-pass budget) in visiting order.
INCREMENT_SCHEDULE = ((B, 6), (R, 6), (G, 3))
DECREMENT_SCHEDULE = ((G, 3), (R, 6), (B, 6))

_OFFSET_FIELD = {G: "off_g", B: "off_b", R: "off_r"}


class MeanTriple(NamedTuple):
    g: int
    b: int
    r: int


@dataclass(frozen=True)
class ControlConfig:
    band: JncdBand = field(default_factory=JncdBand)
    max_passes: int = 4

    def __post_init__(self):
        if self.max_passes < 0:
            raise ValueError(f"max_passes must be non-negative, got {self.max_passes}")

    @property
    def max_trials(self) -> int:
        """Hard cap on trial reconstructions for one direction."""
        return self.max_passes * sum(budget for _, budget in INCREMENT_SCHEDULE)


@dataclass
class CuView:
    """One coding unit: raw (3, N, N) samples in G, B, R order plus a validity mask.

    Edge CUs are padded by edge replication; ``mask`` is False on padding.
    """

    origin: tuple[int, int]
    size: int
    bit_depth: int
    raw: np.ndarray
    mask: np.ndarray
    recon: np.ndarray | None = None

    def __post_init__(self):
        n = self.size
        if self.raw.shape != (3, n, n):
            raise ValueError(f"raw blocks have shape {self.raw.shape}, expected (3, {n}, {n})")
        if self.mask.shape != (n, n):
            raise ValueError(f"mask has shape {self.mask.shape}, expected ({n}, {n})")

    @property
    def raw_means(self) -> MeanTriple:
        return cu_means(self.raw, self.mask)


@dataclass(frozen=True)
class Visit:
    state: QpState
    delta_e: float
    pass_index: int  # 0 for the initial evaluation
    channel: int | None


@dataclass
class AdjustResult:
    state: QpState
    delta_e: float
    start: Jncd
    in_band: bool
    trials: int
    visits: list[Visit] = field(default_factory=list)

    @property
    def direction(self) -> int:
        return {Jncd.BELOW: 1, Jncd.ABOVE: -1, Jncd.WITHIN: 0}[self.start]


def cu_means(blocks: np.ndarray, mask: np.ndarray | None = None) -> MeanTriple:
    """Per-channel mean over valid samples, rounded half-up."""
    blocks = np.asarray(blocks)
    if mask is None:
        mask = np.ones(blocks.shape[1:], dtype=bool)
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise ValueError("mask selects no samples")
    sums = [int(blocks[c][mask].astype(np.int64).sum()) for c in range(3)]
    # floor(sum / count + 1/2) in exact integer arithmetic
    return MeanTriple(*((2 * s + count) // (2 * count) for s in sums))


def cu_delta_e(raw_means: MeanTriple, recon_means: MeanTriple, bit_depth: int) -> float:
    lab_raw = rgb_to_lab(raw_means.r, raw_means.g, raw_means.b, bit_depth)
    lab_rec = rgb_to_lab(recon_means.r, recon_means.g, recon_means.b, bit_depth)
    return delta_e_ab(lab_raw, lab_rec)


def unit_steps(direction: int, max_passes: int) -> Iterator[tuple[int, int]]:
    """Yield (pass_index, channel) for every unit step the search may take."""
    schedule = INCREMENT_SCHEDULE if direction > 0 else DECREMENT_SCHEDULE
    for p in range(1, max_passes + 1):
        for channel, budget in schedule:
            for _ in range(budget):
                yield p, channel


def _step(state: QpState, channel: int, direction: int) -> QpState:
    name = _OFFSET_FIELD[channel]
    return dataclasses.replace(state, **{name: getattr(state, name) + direction})


def _saturated(state: QpState, direction: int) -> bool:
    limit = QP_MAX if direction > 0 else QP_MIN
    return all(q == limit for q in state.qps)


def _fallback(visits: list[Visit], start: Jncd, band: JncdBand) -> Visit:
    if start is Jncd.BELOW:
        # largest difference that does not overshoot; later (coarser) state wins ties
        ok = [v for v in visits if v.delta_e <= band.high]
        return max(reversed(ok), key=lambda v: v.delta_e)
    # smallest difference not under the band; earlier (coarser) state wins ties
    ok = [v for v in visits if v.delta_e >= band.low]
    return min(ok, key=lambda v: v.delta_e)


ReconFn = Callable[[QpState], np.ndarray]


def pcc_adjust(cu: CuView, iqp: int, cfg: ControlConfig, recon: ReconFn) -> AdjustResult:
    """Search per-channel QP offsets for one CU until the mean-color difference
    between raw and reconstructed samples lands in the JNCD band.

    ``recon`` maps a QpState to the (3, N, N) reconstruction of the CU. When the
    band is never reached the best visited state is returned (see ``_fallback``)
    with ``in_band`` False.
    """
    raw_means = cu.raw_means

    def evaluate(state: QpState) -> float:
        rec = recon(state)
        return cu_delta_e(raw_means, cu_means(rec, cu.mask), cu.bit_depth)

    state = QpState(iqp)
    de = evaluate(state)
    trials = 1
    visits = [Visit(state, de, 0, None)]
    start = classify_jncd(de, cfg.band)
    if start is Jncd.WITHIN:
        return AdjustResult(state, de, start, True, trials, visits)

    direction = 1 if start is Jncd.BELOW else -1
    for pass_index, channel in unit_steps(direction, cfg.max_passes):
        if _saturated(state, direction):
            break
        nxt = _step(state, channel, direction)
        if nxt.qps != state.qps:
            de = evaluate(nxt)
            trials += 1
        state = nxt
        visits.append(Visit(state, de, pass_index, channel))
        if classify_jncd(de, cfg.band) is Jncd.WITHIN:
            return AdjustResult(state, de, start, True, trials, visits)

    assert trials <= cfg.max_trials + 1, "trial budget exceeded"
    best = _fallback(visits, start, cfg.band)
    return AdjustResult(best.state, best.delta_e, start, False, trials, visits)

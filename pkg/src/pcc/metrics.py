"""Rate and quality measures: BPP, PSNR, SSIM and MS-SSIM.

SSIM uses an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03 and
'valid' filtering (no border padding). Color images are scored per channel and
averaged with equal weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .bitstream import read_header
from .image_io import ImagePlanar

LOSSLESS = math.inf

MS_SSIM_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
WINDOW_SIZE = 11
WINDOW_SIGMA = 1.5
K1, K2 = 0.01, 0.03
MS_SSIM_MIN_SIZE = WINDOW_SIZE * 2 ** (len(MS_SSIM_WEIGHTS) - 1)  # 176


@dataclass
class PsnrReport:
    g: float
    b: float
    r: float
    mean: float  # from the MSE pooled over all three channels

    @property
    def lossless(self) -> bool:
        return self.mean == LOSSLESS


@dataclass
class MetricsReport:
    bpp: float | None
    ssim: float
    ms_ssim: float | None  # None when the image is too small for five scales
    psnr: PsnrReport


def _check_pair(ref: ImagePlanar, test: ImagePlanar) -> None:
    if (ref.width, ref.height) != (test.width, test.height):
        raise ValueError(
            f"dimension mismatch: {ref.width}x{ref.height} vs {test.width}x{test.height}"
        )
    if ref.bit_depth != test.bit_depth:
        raise ValueError(f"bit depth mismatch: {ref.bit_depth} vs {test.bit_depth}")


def bpp(data: bytes, image: ImagePlanar) -> float:
    """Bits per pixel of a serialized stream for ``image``."""
    header = read_header(data)
    if (header.width, header.height) != (image.width, image.height):
        raise ValueError(
            f"stream is {header.width}x{header.height}, image is {image.width}x{image.height}"
        )
    return 8 * len(data) / (image.width * image.height)


def _psnr(mse: float, peak: int) -> float:
    if mse == 0:
        return LOSSLESS
    return 10.0 * math.log10(peak * peak / mse)


def psnr(ref: ImagePlanar, test: ImagePlanar) -> PsnrReport:
    _check_pair(ref, test)
    diff = ref.planes.astype(np.float64) - test.planes.astype(np.float64)
    mse = (diff * diff).mean(axis=(1, 2))
    peak = ref.max_value
    return PsnrReport(*(_psnr(float(m), peak) for m in mse), _psnr(float(mse.mean()), peak))


def gaussian_window(size: int = WINDOW_SIZE, sigma: float = WINDOW_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    k = w.shape[0]
    x = sliding_window_view(x, k, axis=0) @ w
    return sliding_window_view(x, k, axis=1) @ w


def _ssim_maps(x: np.ndarray, y: np.ndarray, peak: float) -> tuple[np.ndarray, np.ndarray]:
    """Return (ssim map, contrast-structure map) for one channel."""
    w = gaussian_window()
    c1 = (K1 * peak) ** 2
    c2 = (K2 * peak) ** 2
    mu_x = _filter_valid(x, w)
    mu_y = _filter_valid(y, w)
    sxx = _filter_valid(x * x, w) - mu_x * mu_x
    syy = _filter_valid(y * y, w) - mu_y * mu_y
    sxy = _filter_valid(x * y, w) - mu_x * mu_y
    cs = (2 * sxy + c2) / (sxx + syy + c2)
    lum = (2 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1)
    return lum * cs, cs


def _channels(ref: ImagePlanar, test: ImagePlanar):
    for c in range(3):
        yield ref.planes[c].astype(np.float64), test.planes[c].astype(np.float64)


def ssim(ref: ImagePlanar, test: ImagePlanar) -> float:
    _check_pair(ref, test)
    if min(ref.width, ref.height) < WINDOW_SIZE:
        raise ValueError(f"SSIM needs images of at least {WINDOW_SIZE}x{WINDOW_SIZE}")
    if ref == test:
        return 1.0
    scores = [float(_ssim_maps(x, y, ref.max_value)[0].mean()) for x, y in _channels(ref, test)]
    return sum(scores) / 3.0


def _downsample(x: np.ndarray) -> np.ndarray:
    h, w = (x.shape[0] // 2) * 2, (x.shape[1] // 2) * 2
    x = x[:h, :w]
    return 0.25 * (x[0::2, 0::2] + x[1::2, 0::2] + x[0::2, 1::2] + x[1::2, 1::2])


def ms_ssim(ref: ImagePlanar, test: ImagePlanar) -> float:
    """Five-scale MS-SSIM; negative per-scale terms are clipped to zero."""
    _check_pair(ref, test)
    if min(ref.width, ref.height) < MS_SSIM_MIN_SIZE:
        raise ValueError(
            f"MS-SSIM needs a minimum dimension of {MS_SSIM_MIN_SIZE}, got {min(ref.width, ref.height)}"
        )
    if ref == test:
        return 1.0
    scores = []
    for x, y in _channels(ref, test):
        value = 1.0
        last = len(MS_SSIM_WEIGHTS) - 1
        for j, weight in enumerate(MS_SSIM_WEIGHTS):
            s_map, cs_map = _ssim_maps(x, y, ref.max_value)
            term = s_map.mean() if j == last else cs_map.mean()
            value *= max(float(term), 0.0) ** weight
            if j != last:
                x, y = _downsample(x), _downsample(y)
        scores.append(value)
    return sum(scores) / 3.0


def evaluate(ref: ImagePlanar, test: ImagePlanar, data: bytes | None = None) -> MetricsReport:
    ms = ms_ssim(ref, test) if min(ref.width, ref.height) >= MS_SSIM_MIN_SIZE else None
    return MetricsReport(
        bpp=bpp(data, ref) if data is not None else None,
        ssim=ssim(ref, test),
        ms_ssim=ms,
        psnr=psnr(ref, test),
    )

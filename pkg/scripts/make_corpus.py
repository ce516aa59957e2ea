"""Build the 256x256 desk corpus used by the report and acceptance runs.

Photographic crops come from the sample images bundled with scikit-image
(public domain / CC0); synthetic images are generated from a fixed seed.
Writes PPM files into ``corpus/`` (or the directory given as argv[1]).
"""

import sys
from pathlib import Path

import numpy as np
from skimage import data

from pcc.image_io import ImagePlanar, write_ppm

SIZE = 256

PHOTO_CROPS = {
    "photo_astronaut": (data.astronaut, 20, 140),
    "photo_chelsea": (data.chelsea, 20, 100),
    "photo_coffee": (data.coffee, 72, 172),
    "photo_rocket": (data.rocket, 100, 200),
    "photo_ihc": (data.immunohistochemistry, 128, 128),
}


def _to_u8(x: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def _grid():
    y, x = np.mgrid[0:SIZE, 0:SIZE] / (SIZE - 1)
    return x, y


def synth_gradient(rng):
    x, y = _grid()
    return _to_u8(np.stack([255 * x, 255 * y, 255 * (1 - x) * (1 - y) + 40 * x * y], -1))


def synth_bars(rng):
    x, _ = _grid()
    colors = np.array([[235, 235, 235], [235, 235, 16], [16, 235, 235], [16, 235, 16],
                       [235, 16, 235], [235, 16, 16], [16, 16, 235], [16, 16, 16]], float)
    idx = np.minimum((x * 8).astype(int), 7)
    img = colors[idx]
    # soften the bar edges a little
    k = np.ones(5) / 5
    img = np.apply_along_axis(lambda v: np.convolve(v, k, mode="same"), 1, img)
    img[:, :2], img[:, -2:] = img[:, 2:3], img[:, -3:-2]
    return _to_u8(img)


def synth_plasma(rng):
    # sum of random low-frequency cosines per channel
    x, y = _grid()
    out = []
    for _ in range(3):
        acc = np.zeros_like(x)
        for octave in range(1, 6):
            fx, fy = rng.uniform(-1, 1, 2) * octave * 2 * np.pi
            acc += np.cos(fx * x + fy * y + rng.uniform(0, 2 * np.pi)) / octave
        out.append(acc)
    img = np.stack(out, -1)
    img = (img - img.min()) / (img.max() - img.min())
    return _to_u8(30 + 195 * img)


def synth_patches(rng):
    img = np.zeros((SIZE, SIZE, 3))
    img[:] = rng.uniform(40, 220, 3)
    for _ in range(14):
        x0, y0 = rng.integers(0, SIZE - 32, 2)
        w, h = rng.integers(24, 120, 2)
        img[y0 : y0 + h, x0 : x0 + w] = rng.uniform(20, 235, 3)
    return _to_u8(img)


def synth_texture(rng):
    x, y = _grid()
    base = np.stack([
        140 + 60 * np.sin(2 * np.pi * (6 * x + 2 * y)),
        120 + 50 * np.sin(2 * np.pi * (3 * x * x + 5 * y)),
        110 + 70 * np.cos(2 * np.pi * (4 * x - 3 * y)),
    ], -1)
    return _to_u8(base + rng.normal(0, 6, base.shape))


SYNTHETIC = {
    "synth_gradient": synth_gradient,
    "synth_bars": synth_bars,
    "synth_plasma": synth_plasma,
    "synth_patches": synth_patches,
    "synth_texture": synth_texture,
}


def build(out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240611)
    written = []
    for name, (loader, y, x) in PHOTO_CROPS.items():
        rgb = loader()[y : y + SIZE, x : x + SIZE, :3]
        written.append(_write(out, name, rgb))
    for name, fn in SYNTHETIC.items():
        written.append(_write(out, name, fn(rng)))
    return written


def _write(out: Path, name: str, rgb: np.ndarray) -> Path:
    assert rgb.shape == (SIZE, SIZE, 3), (name, rgb.shape)
    path = out / f"{name}.ppm"
    write_ppm(ImagePlanar.from_rgb(rgb), path)
    return path


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "corpus"
    for p in build(target):
        print(p)

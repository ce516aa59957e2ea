from pathlib import Path

import numpy as np
import pytest

from pcc.image_io import ImagePlanar

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def random_image(rng, width, height, bit_depth=8, smooth=False):
    top = (1 << bit_depth) - 1
    if smooth:
        y, x = np.mgrid[0:height, 0:width]
        phase = rng.uniform(0, 2 * np.pi, (3, 1, 1))
        freq = rng.uniform(0.02, 0.2, (3, 2, 1, 1))
        planes = 0.5 + 0.4 * np.sin(freq[:, 0] * x + freq[:, 1] * y + phase)
        planes = planes + rng.normal(0, 0.02, planes.shape)
        planes = np.clip(np.rint(planes * top), 0, top)
    else:
        planes = rng.integers(0, top + 1, (3, height, width))
    return ImagePlanar(width, height, bit_depth, planes.astype(np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def corpus_paths():
    paths = sorted(CORPUS.glob("*.ppm"))
    if len(paths) < 10:
        pytest.skip("desk corpus missing; run scripts/make_corpus.py")
    return paths


# one verdict line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])

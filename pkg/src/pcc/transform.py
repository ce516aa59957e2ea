"""Separable orthonormal 2-D DCT-II on square blocks."""

from __future__ import annotations

import functools

import numpy as np

SUPPORTED_SIZES = (4, 8, 16, 32, 64)


@functools.lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row k is the k-th basis vector."""
    if n not in SUPPORTED_SIZES:
        raise ValueError(f"unsupported block size {n}; expected one of {SUPPORTED_SIZES}")
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    m.setflags(write=False)
    return m


def _check_square(block: np.ndarray) -> int:
    if block.ndim != 2 or block.shape[0] != block.shape[1]:
        raise ValueError(f"expected a square block, got shape {block.shape}")
    return block.shape[0]


def forward_dct2d(block: np.ndarray) -> np.ndarray:
    """DCT of an already-centered residual block (rows, then columns)."""
    block = np.asarray(block, dtype=np.float64)
    c = dct_matrix(_check_square(block))
    return c @ block @ c.T


def inverse_dct2d(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    c = dct_matrix(_check_square(coeffs))
    return c.T @ coeffs @ c


def center_offset(bit_depth: int) -> int:
    return 1 << (bit_depth - 1)

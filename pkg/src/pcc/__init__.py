"""Perceptual color compression for RGB 4:4:4 images.

Per-CU, per-channel QP offsets are searched until the CIELAB difference between
the rounded mean colors of the raw and reconstructed CU reaches the just
noticeable color difference (delta E ~ 2.3).
"""

from .codec import EncoderConfig, EncodeResult, decode_image, encode, encode_image
from .colorimetry import JncdBand, LabColor, classify_jncd, delta_e_ab, rgb_to_lab
from .image_io import ImagePlanar, read_ppm, write_ppm
from .jncd_control import ControlConfig, pcc_adjust

__all__ = [
    "ControlConfig",
    "EncodeResult",
    "EncoderConfig",
    "ImagePlanar",
    "JncdBand",
    "LabColor",
    "classify_jncd",
    "decode_image",
    "delta_e_ab",
    "encode",
    "encode_image",
    "pcc_adjust",
    "read_ppm",
    "rgb_to_lab",
    "write_ppm",
]

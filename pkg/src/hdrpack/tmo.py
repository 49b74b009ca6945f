"""Tone mapping from HDR codes to an 8-bit LDR image.

Any deterministic operator works here because the extension layer corrects
every base-layer error; the two operators below trade fidelity for being
exactly reproducible from a handful of metadata fields.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, UnsupportedKind
from .model import HdrImage, PixelType, half_codes_to_float32


class TmoKind(enum.Enum):
    REINHARD_GLOBAL = "reinhard"
    BIT_SHIFT = "bitshift"


@dataclass(frozen=True)
class TmoParams:
    """Fully determines the forward map and the 256-entry inverse lookup."""

    kind: TmoKind
    exposure_scale: float = 1.0
    gamma: float = 2.2

    def __post_init__(self):
        if self.exposure_scale <= 0:
            raise ValueError("exposure_scale must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class LdrImage:
    """8-bit planar RGB image, same dimensions as its HDR source."""

    width: int
    height: int
    planes: tuple[np.ndarray, np.ndarray, np.ndarray]  # uint8, shape (height, width)


def default_tmo(pixel_type: PixelType) -> TmoParams:
    kind = TmoKind.REINHARD_GLOBAL if pixel_type.is_half else TmoKind.BIT_SHIFT
    return TmoParams(kind)


def reinhard_scalar(value: float, params: TmoParams) -> int:
    """One sample of the forward operator: L/(1+L), gamma, quantize to 8 bits.

    IEEE binary64 scalar arithmetic throughout; non-finite inputs read
    as 0. This single definition is the operator: the vectorized path
    tabulates it over all 65536 half codes.
    """
    v = value if math.isfinite(value) else 0.0
    scaled = params.exposure_scale * max(v, 0.0)
    t = scaled / (1.0 + scaled)
    y = math.pow(t, 1.0 / params.gamma)
    return min(255, math.floor(y * 256.0))


@lru_cache(maxsize=8)
def _reinhard_code_lut(params: TmoParams) -> np.ndarray:
    values = half_codes_to_float32(np.arange(65536, dtype=np.uint16))
    return np.array([reinhard_scalar(float(v), params) for v in values], dtype=np.uint8)


def tone_map(hdr: HdrImage, params: TmoParams) -> LdrImage:
    """Deterministic HDR -> LDR map; same (hdr, params) gives the same output."""
    if params.kind is TmoKind.BIT_SHIFT:
        if hdr.pixel_type.is_half:
            raise UnsupportedKind("BitShift requires an integer pixel type")
        shift = hdr.pixel_type.bit_depth - 8
        planes = tuple((p >> shift).astype(np.uint8) for p in hdr.planes)
    elif params.kind is TmoKind.REINHARD_GLOBAL:
        if not hdr.pixel_type.is_half:
            raise UnsupportedKind("ReinhardGlobal requires half-float pixels")
        lut = _reinhard_code_lut(params)
        planes = tuple(lut[p] for p in hdr.planes)
    else:  # pragma: no cover - enum is closed
        raise UnsupportedKind(f"unknown TMO kind {params.kind}")
    return LdrImage(hdr.width, hdr.height, planes)


def validate_ldr(ldr: LdrImage) -> None:
    for i, p in enumerate(ldr.planes):
        if p.shape != (ldr.height, ldr.width):
            raise DimensionMismatch(f"LDR plane {i} shape {p.shape}")
        if p.dtype != np.uint8:
            raise DimensionMismatch(f"LDR plane {i} dtype {p.dtype}")

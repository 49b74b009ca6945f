"""Pixel and image data model.

HDR pixels are carried as unsigned 16-bit *codes*: either the raw bit
pattern of an IEEE binary16 value, or a native 12/16-bit integer sample.
The half-float <-> code mapping is a pure reinterpretation and therefore
bijective, which is what makes lossless coding of float imagery possible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SampleOutOfRange

CODE_BITS = 16
CODE_LIMIT = 1 << CODE_BITS


@dataclass(frozen=True)
class PixelType:
    """Either half-float codes or unsigned integers of ``bit_depth`` bits.

    ``bit_depth`` is None for half-float; integer depths are limited to
    [8, 16] so every sample fits a 16-bit code.
    """

    bit_depth: int | None = None

    def __post_init__(self):
        if self.bit_depth is not None and not 8 <= self.bit_depth <= 16:
            raise ValueError(f"bit depth {self.bit_depth} outside [8, 16]")

    @classmethod
    def uint(cls, bit_depth: int) -> "PixelType":
        return cls(bit_depth)

    @property
    def is_half(self) -> bool:
        return self.bit_depth is None

    @property
    def code_limit(self) -> int:
        """One past the largest valid code."""
        return CODE_LIMIT if self.bit_depth is None else 1 << self.bit_depth

    def __repr__(self):
        return "PixelType(half)" if self.is_half else f"PixelType(uint{self.bit_depth})"


HALF_FLOAT = PixelType(None)


def half_to_code(half_bits: int) -> int:
    """Reinterpret a binary16 bit pattern as an unsigned 16-bit code.

    NaN and Inf patterns are opaque payloads, never canonicalized; the map
    is the identity on bit patterns and hence exactly invertible.
    """
    code = int(half_bits)
    if not 0 <= code < CODE_LIMIT:
        raise ValueError(f"not a 16-bit pattern: {half_bits}")
    return code


def code_to_half(code: int) -> int:
    """Inverse of :func:`half_to_code` (also the identity on bit patterns)."""
    return half_to_code(code)


def half_codes_to_float32(codes: np.ndarray) -> np.ndarray:
    """View an array of codes as binary16 and widen to float32 (exact)."""
    with np.errstate(invalid="ignore"):
        return np.ascontiguousarray(codes, dtype=np.uint16).view(np.float16).astype(np.float32)


def float32_to_half_codes(values: np.ndarray) -> np.ndarray:
    """Convert float32 values to nearest-even binary16 and return the codes."""
    with np.errstate(invalid="ignore", over="ignore"):
        return np.asarray(values, dtype=np.float32).astype(np.float16).view(np.uint16)


@dataclass(frozen=True)
class HdrImage:
    """Planar 3-component image of 16-bit sample codes, RGB order."""

    width: int
    height: int
    planes: tuple[np.ndarray, np.ndarray, np.ndarray]  # uint16, shape (height, width)
    pixel_type: PixelType

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


def make_image(width: int, height: int, planes, pixel_type: PixelType) -> HdrImage:
    """Validate and build an :class:`HdrImage`.

    Raises DimensionMismatch when a plane is not height x width, and
    SampleOutOfRange when a UInt(d) plane holds a code >= 2^d.
    """
    if width <= 0 or height <= 0:
        raise DimensionMismatch(f"bad dimensions {width}x{height}")
    if len(planes) != 3:
        raise DimensionMismatch(f"expected 3 planes, got {len(planes)}")
    limit = pixel_type.code_limit
    out = []
    for i, plane in enumerate(planes):
        arr = np.asarray(plane)
        if arr.ndim == 1:
            if arr.size != width * height:
                raise DimensionMismatch(
                    f"plane {i} has {arr.size} samples, expected {width * height}"
                )
            arr = arr.reshape(height, width)
        elif arr.shape != (height, width):
            raise DimensionMismatch(
                f"plane {i} shape {arr.shape}, expected {(height, width)}"
            )
        if not np.issubdtype(arr.dtype, np.integer):
            raise DimensionMismatch(f"plane {i} dtype {arr.dtype} is not integer")
        arr = arr.astype(np.int64, copy=False)
        if arr.size:
            bad = (arr < 0) | (arr >= limit)
            if bad.any():
                idx = int(np.flatnonzero(bad.ravel())[0])
                raise SampleOutOfRange(i, idx, int(arr.ravel()[idx]), limit)
        out.append(arr.astype(np.uint16))
    return HdrImage(width, height, tuple(out), pixel_type)

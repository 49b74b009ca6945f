"""HDR prediction from the decoded base layer, residuals, and the
reversible inter-component transform.

The prediction is a per-component 256-entry lookup built only from the
tone-mapping parameters and pixel type, so encoder and decoder derive the
identical table from container metadata; the table itself is never sent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, RangeViolation, UnsupportedKind
from .model import HdrImage, PixelType, float32_to_half_codes, make_image
from .tmo import LdrImage, TmoKind, TmoParams

HALF_MAX_FINITE = 65504.0


@dataclass(frozen=True)
class InverseTmoLut:
    """Predicted HDR code per LDR code, one 256-entry table per component."""

    tables: tuple[np.ndarray, np.ndarray, np.ndarray]  # uint16[256] each


def build_inverse_lut(params: TmoParams, pixel_type: PixelType) -> InverseTmoLut:
    """Construct the prediction lookup by inverting the operator at bin centers."""
    if params.kind is TmoKind.BIT_SHIFT:
        if pixel_type.is_half:
            raise UnsupportedKind("BitShift requires an integer pixel type")
        d = pixel_type.bit_depth
        v = np.arange(256, dtype=np.int64)
        lut = (v << (d - 8)) + ((1 << (d - 8)) >> 1)  # bin midpoint
        lut = lut.astype(np.uint16)
    elif params.kind is TmoKind.REINHARD_GLOBAL:
        if not pixel_type.is_half:
            raise UnsupportedKind("ReinhardGlobal requires half-float pixels")
        values = np.empty(256, dtype=np.float64)
        for v in range(256):  # scalar math: the inverse must match bit for bit
            y = (v + 0.5) / 256.0        # bin center in quantized output space
            t = math.pow(y, params.gamma)  # undo gamma
            if t >= 1.0:
                value = HALF_MAX_FINITE
            else:
                value = t / (1.0 - t) / params.exposure_scale  # undo L/(1+L)
            values[v] = min(value, HALF_MAX_FINITE)
        lut = float32_to_half_codes(values.astype(np.float32))
    else:  # pragma: no cover
        raise UnsupportedKind(f"unknown TMO kind {params.kind}")
    return InverseTmoLut((lut.copy(), lut.copy(), lut.copy()))


def predict(lut: InverseTmoLut, ldr: LdrImage) -> tuple[np.ndarray, ...]:
    """Predicted HDR code planes for a decoded LDR image."""
    return tuple(lut.tables[c][ldr.planes[c]] for c in range(3))


def compute_residual(orig: HdrImage, predicted) -> tuple[np.ndarray, ...]:
    """Signed residual orig - predicted, exact, per component."""
    out = []
    for c in range(3):
        p = np.asarray(predicted[c])
        if p.shape != orig.planes[c].shape:
            raise DimensionMismatch(
                f"prediction plane {c} shape {p.shape} != {orig.planes[c].shape}"
            )
        out.append(orig.planes[c].astype(np.int32) - p.astype(np.int32))
    return tuple(out)


def reconstruct(predicted, residual, pixel_type: PixelType) -> HdrImage:
    """Inverse of compute_residual; validates the code range.

    A sum outside [0, code_limit) means the extension data does not match
    the base layer, which is reported rather than clamped away.
    """
    planes = []
    limit = pixel_type.code_limit
    height, width = np.asarray(predicted[0]).shape
    for c in range(3):
        p = np.asarray(predicted[c]).astype(np.int64)
        r = np.asarray(residual[c]).astype(np.int64)
        if p.shape != r.shape:
            raise DimensionMismatch(f"residual plane {c} shape {r.shape} != {p.shape}")
        s = p + r
        if s.size and (s.min() < 0 or s.max() >= limit):
            raise RangeViolation(
                f"component {c}: reconstructed code outside [0, {limit})"
            )
        planes.append(s.astype(np.uint16))
    return make_image(width, height, planes, pixel_type)


def rct_forward(r: np.ndarray, g: np.ndarray, b: np.ndarray):
    """Reversible integer color transform of residual planes.

    y = floor((r + 2g + b) / 4), u = b - g, v = r - g. Chroma outputs may
    need two more bits than the inputs.
    """
    r = np.asarray(r).astype(np.int64)
    g = np.asarray(g).astype(np.int64)
    b = np.asarray(b).astype(np.int64)
    if r.shape != g.shape or g.shape != b.shape:
        raise DimensionMismatch("component planes differ in shape")
    y = (r + 2 * g + b) // 4
    u = b - g
    v = r - g
    return y, u, v


def rct_inverse(y: np.ndarray, u: np.ndarray, v: np.ndarray):
    """Exact inverse of rct_forward on all integer inputs."""
    y = np.asarray(y).astype(np.int64)
    u = np.asarray(u).astype(np.int64)
    v = np.asarray(v).astype(np.int64)
    if y.shape != u.shape or u.shape != v.shape:
        raise DimensionMismatch("component planes differ in shape")
    g = y - (u + v) // 4
    r = v + g
    b = u + g
    return r, g, b

"""Independent oracles used across the test suite.

Everything here is deliberately written from first principles (straight
from the published algorithms) rather than by calling into hdrpack, so a
bug in the implementation cannot hide in its own test.
"""
from __future__ import annotations

import math
import struct

import numpy as np


def walk_jpeg_markers(data: bytes) -> list[str]:
    """Validate JPEG marker grammar and segment lengths; return marker names.

    Raises AssertionError on any structural violation.
    """
    names = {
        0xC0: "SOF0", 0xC2: "SOF2", 0xC4: "DHT", 0xD8: "SOI", 0xD9: "EOI",
        0xDA: "SOS", 0xDB: "DQT", 0xDD: "DRI", 0xFE: "COM",
    }
    for i in range(16):
        names[0xE0 + i] = f"APP{i}"
    standalone = {0xD8, 0xD9, 0x01} | set(range(0xD0, 0xD8))

    assert data[:2] == b"\xff\xd8", "missing SOI"
    seen = ["SOI"]
    pos = 2
    while True:
        assert pos + 2 <= len(data), "ran off the end looking for a marker"
        assert data[pos] == 0xFF, f"expected 0xFF at {pos}"
        marker = data[pos + 1]
        name = names.get(marker, f"M{marker:02X}")
        if marker == 0xD9:
            seen.append("EOI")
            assert pos + 2 == len(data), "bytes after EOI"
            return seen
        if marker in standalone:
            seen.append(name)
            pos += 2
            continue
        length = struct.unpack(">H", data[pos + 2 : pos + 4])[0]
        assert length >= 2 and pos + 2 + length <= len(data), f"bad length in {name}"
        seen.append(name)
        pos += 2 + length
        if marker == 0xDA:
            while True:
                assert pos + 1 < len(data), "entropy data without terminating marker"
                if data[pos] == 0xFF and data[pos + 1] not in (0x00,) \
                        and not 0xD0 <= data[pos + 1] <= 0xD7:
                    break
                pos += 1


def float_to_half_bits(f32_bits: int) -> int:
    """Scalar float32 -> binary16 conversion with round-to-nearest-even.

    Direct port of the classic software half conversion (numpy's
    halffloat.c); used as the reference for the vectorized cast.
    """
    h_sgn = (f32_bits & 0x80000000) >> 16
    f_exp = f32_bits & 0x7F800000
    if f_exp >= 0x47800000:
        if f_exp == 0x7F800000:
            f_sig = f32_bits & 0x007FFFFF
            if f_sig != 0:
                ret = 0x7C00 + (f_sig >> 13)
                if ret == 0x7C00:
                    ret += 1
                return h_sgn + ret
            return h_sgn + 0x7C00
        return h_sgn + 0x7C00
    if f_exp <= 0x38000000:
        if f_exp < 0x33000000:
            return h_sgn
        f_exp >>= 23
        f_sig = 0x00800000 + (f32_bits & 0x007FFFFF)
        if (f_sig & ((1 << (126 - f_exp)) - 1)) != 0:
            pass  # inexact; rounding below handles it
        f_sig >>= 113 - f_exp
        if (f_sig & 0x00003FFF) != 0x00001000:
            f_sig += 0x00001000
        return h_sgn + (f_sig >> 13)
    h_exp = (f_exp - 0x38000000) >> 13  # exponent lands at bit 10
    f_sig = f32_bits & 0x007FFFFF
    if (f_sig & 0x00003FFF) != 0x00001000:
        f_sig += 0x00001000
    h_sig = f_sig >> 13
    # a rounding carry out of h_sig correctly increments the exponent
    return h_sgn + h_exp + h_sig


def half_bits_of(value: float) -> int:
    """Bit pattern of a Python float narrowed to binary16 (via struct)."""
    return struct.unpack("<H", struct.pack("<e", value))[0]


def float_bits_of(value: float) -> int:
    return struct.unpack("<I", struct.pack("<f", value))[0]


def dct2d_float(block: np.ndarray) -> np.ndarray:
    """Textbook O(N^4) float DCT-II with JPEG normalization."""
    out = np.zeros((8, 8))
    for u in range(8):
        for v in range(8):
            cu = 1 / math.sqrt(2) if u == 0 else 1.0
            cv = 1 / math.sqrt(2) if v == 0 else 1.0
            s = 0.0
            for y in range(8):
                for x in range(8):
                    s += block[y, x] * math.cos((2 * x + 1) * v * math.pi / 16) \
                         * math.cos((2 * y + 1) * u * math.pi / 16)
            out[u, v] = 0.25 * cu * cv * s
    return out


def med_predict(plane: np.ndarray) -> np.ndarray:
    """Median-edge-detector predictions, straight from the JPEG-LS definition."""
    h, w = plane.shape
    pred = np.zeros((h, w), dtype=np.int64)
    for y in range(h):
        for x in range(w):
            a = plane[y, x - 1] if x > 0 else 0
            b = plane[y - 1, x] if y > 0 else 0
            c = plane[y - 1, x - 1] if (x > 0 and y > 0) else 0
            if c >= max(a, b):
                pred[y, x] = min(a, b)
            elif c <= min(a, b):
                pred[y, x] = max(a, b)
            else:
                pred[y, x] = a + b - c
    return pred

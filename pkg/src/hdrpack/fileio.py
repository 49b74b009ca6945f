"""PFM and 16-bit PPM readers/writers.

PFM carries float32 pixels; they are narrowed to nearest-even binary16 on
read, so a PFM written from half-precision codes reads back bit-exactly
(including NaN payloads). PPM carries big-endian 16-bit integer samples.
"""
from __future__ import annotations

import numpy as np

from .errors import MalformedHeader, MaxvalUnsupported, UnsupportedPfm, WrongPixelType
from .model import (
    HALF_FLOAT,
    HdrImage,
    PixelType,
    float32_to_half_codes,
    half_codes_to_float32,
    make_image,
)

_WS = b" \t\r\n\x0b\x0c"


def _next_token(data: bytes, pos: int, comments: bool) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        if data[pos : pos + 1] in _WS:
            pos += 1
        elif comments and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
        else:
            break
    if pos >= n:
        raise MalformedHeader("header ends unexpectedly")
    start = pos
    while pos < n and data[pos : pos + 1] not in _WS:
        pos += 1
    return data[start:pos], pos


def _skip_single_ws(data: bytes, pos: int) -> int:
    # exactly one whitespace byte separates the header from binary data
    if pos >= len(data) or data[pos : pos + 1] not in _WS:
        raise MalformedHeader("missing separator before pixel data")
    return pos + 1


def read_pfm(path) -> HdrImage:
    """Read a color PFM; floats are converted to nearest-even half codes."""
    with open(path, "rb") as f:
        data = f.read()

    magic, pos = _next_token(data, 0, comments=False)
    if magic == b"Pf":
        raise UnsupportedPfm("grayscale (Pf) images are not supported")
    if magic != b"PF":
        raise UnsupportedPfm(f"unrecognized magic {magic!r}")
    wtok, pos = _next_token(data, pos, comments=False)
    htok, pos = _next_token(data, pos, comments=False)
    stok, pos = _next_token(data, pos, comments=False)
    pos = _skip_single_ws(data, pos)
    try:
        width, height = int(wtok), int(htok)
        scale = float(stok)
    except ValueError:
        raise MalformedHeader("non-numeric PFM header fields") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if scale == 0 or scale != scale:
        raise MalformedHeader(f"bad scale {scale}")

    count = width * height * 3
    raw = data[pos : pos + count * 4]
    if len(raw) < count * 4:
        raise MalformedHeader("pixel data truncated")
    dtype = "<f4" if scale < 0 else ">f4"
    pixels = np.frombuffer(raw, dtype=dtype).astype(np.float32)
    pixels = pixels.reshape(height, width, 3)
    pixels = pixels[::-1]  # PFM rows are bottom-up
    planes = [float32_to_half_codes(pixels[:, :, c]) for c in range(3)]
    return make_image(width, height, planes, HALF_FLOAT)


def write_pfm(img: HdrImage, path) -> None:
    """Write a half-float image as little-endian color PFM (codes widen exactly)."""
    if not img.pixel_type.is_half:
        raise WrongPixelType("write_pfm requires a half-float image")
    stacked = np.stack([half_codes_to_float32(p) for p in img.planes], axis=2)
    stacked = stacked[::-1]
    header = f"PF\n{img.width} {img.height}\n-1.0\n".encode("ascii")
    with open(path, "wb") as f:
        f.write(header)
        f.write(stacked.astype("<f4").tobytes())


def read_ppm16(path) -> HdrImage:
    """Read a binary PPM with two-byte samples (maxval 256..65535)."""
    with open(path, "rb") as f:
        data = f.read()

    magic, pos = _next_token(data, 0, comments=True)
    if magic != b"P6":
        raise MalformedHeader(f"unrecognized magic {magic!r}")
    wtok, pos = _next_token(data, pos, comments=True)
    htok, pos = _next_token(data, pos, comments=True)
    mtok, pos = _next_token(data, pos, comments=True)
    pos = _skip_single_ws(data, pos)
    try:
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except ValueError:
        raise MalformedHeader("non-numeric PPM header fields") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad dimensions {width}x{height}")
    if maxval > 65535 or maxval <= 0:
        raise MalformedHeader(f"maxval {maxval} outside PPM range")
    if maxval <= 255:
        raise MaxvalUnsupported("maxval <= 255 is an 8-bit PPM; this reader is 16-bit only")

    count = width * height * 3
    raw = data[pos : pos + count * 2]
    if len(raw) < count * 2:
        raise MalformedHeader("pixel data truncated")
    samples = np.frombuffer(raw, dtype=">u2").astype(np.int64).reshape(height, width, 3)
    if samples.max() > maxval:
        raise MalformedHeader(f"sample {samples.max()} exceeds maxval {maxval}")
    depth = maxval.bit_length()
    planes = [samples[:, :, c] for c in range(3)]
    return make_image(width, height, planes, PixelType.uint(depth))


def write_ppm16(img: HdrImage, path) -> None:
    """Write an integer image as binary PPM with maxval 2^depth - 1."""
    if img.pixel_type.is_half:
        raise WrongPixelType("write_ppm16 requires an integer image")
    maxval = img.pixel_type.code_limit - 1
    if maxval <= 255:
        raise MaxvalUnsupported("8-bit images cannot be written as 16-bit PPM")
    header = f"P6\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    stacked = np.stack(img.planes, axis=2).astype(">u2")
    with open(path, "wb") as f:
        f.write(header)
        f.write(stacked.tobytes())

"""Pluggable lossless codecs for packed index planes.

Two built-ins: "MRC1", a median-edge-detector predictor with adaptive
Golomb-Rice coding, and "RAW1", fixed-width bit packing (reference and
worst-case fallback). Third-party codecs can be added through the
registry; decode rejects ids it does not know.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _rice
from .errors import CorruptPayload, IndexOverflow, UnknownCodec

MEDRICE_ID = "MRC1"
RAW_ID = "RAW1"

# keeps zigzag(e) inside the 32-bit verbatim escape word
MAX_SUPPORTED_INDEX = (1 << 30) - 1

_HEADER = struct.Struct(">4sIII")


@dataclass(frozen=True)
class CodedPlane:
    """Self-contained coded plane: codec_id(4) | width | height | max_index | payload."""

    codec_id: str
    width: int
    height: int
    max_index: int
    payload: bytes

    def to_bytes(self) -> bytes:
        return _HEADER.pack(
            self.codec_id.encode("ascii"), self.width, self.height, self.max_index
        ) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "CodedPlane":
        if len(data) < _HEADER.size:
            raise CorruptPayload(0, "coded plane shorter than its header")
        cid, width, height, max_index = _HEADER.unpack_from(data)
        try:
            codec_id = cid.decode("ascii")
        except UnicodeDecodeError:
            raise UnknownCodec(cid) from None
        if width == 0 or height == 0:
            raise CorruptPayload(4, "zero plane dimension")
        return cls(codec_id, width, height, max_index, data[_HEADER.size:])


def _check_plane(plane: np.ndarray) -> np.ndarray:
    p = np.asarray(plane, dtype=np.int64)
    if p.ndim != 2 or p.size == 0:
        raise ValueError("index plane must be a non-empty 2-D array")
    if p.min() < 0:
        raise ValueError("index plane holds negative values")
    if p.max() > MAX_SUPPORTED_INDEX:
        raise ValueError(f"index {p.max()} exceeds codec limit {MAX_SUPPORTED_INDEX}")
    return p


def encode_plane_raw(plane: np.ndarray) -> CodedPlane:
    """Fixed-width packing at ceil(log2(max+1)) bits per sample, MSB first."""
    p = _check_plane(plane)
    h, w = p.shape
    max_index = int(p.max())
    bits = max_index.bit_length()  # 0 when the plane is all zeros
    if bits == 0:
        payload = b""
    else:
        flat = p.ravel()
        shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
        bitmat = ((flat[:, None] >> shifts) & 1).astype(np.uint8)
        payload = np.packbits(bitmat.ravel()).tobytes()
    return CodedPlane(RAW_ID, w, h, max_index, payload)


def _decode_raw(cp: CodedPlane) -> np.ndarray:
    n = cp.width * cp.height
    bits = cp.max_index.bit_length()
    if bits == 0:
        if cp.payload:
            raise CorruptPayload(0, "payload present for all-zero plane")
        return np.zeros((cp.height, cp.width), dtype=np.int64)
    expect = (n * bits + 7) // 8
    if len(cp.payload) != expect:
        raise CorruptPayload(0, f"payload is {len(cp.payload)} bytes, expected {expect}")
    bitstream = np.unpackbits(np.frombuffer(cp.payload, dtype=np.uint8))
    if bitstream[n * bits:].any():
        raise CorruptPayload(n * bits, "nonzero padding bits")
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    vals = (bitstream[: n * bits].reshape(n, bits).astype(np.int64) << shifts).sum(axis=1)
    if vals.max() > cp.max_index:
        raise IndexOverflow(f"decoded index {vals.max()} > max_index {cp.max_index}")
    return vals.reshape(cp.height, cp.width)


def encode_plane_medrice(plane: np.ndarray) -> CodedPlane:
    p = _check_plane(plane)
    h, w = p.shape
    buf, nbytes = _rice.encode(p.ravel(), w)
    return CodedPlane(MEDRICE_ID, w, h, int(p.max()), buf[:nbytes].tobytes())


def _decode_medrice(cp: CodedPlane) -> np.ndarray:
    data = np.frombuffer(cp.payload, dtype=np.uint8)
    vals, status, bitpos = _rice.decode(
        data, cp.width * cp.height, cp.width, cp.max_index
    )
    if status == _rice.ERR_RANGE:
        raise IndexOverflow(f"decoded sample outside [0, {cp.max_index}]")
    if status != _rice.OK:
        reasons = {
            _rice.ERR_TRUNCATED: "payload ends mid-codeword",
            _rice.ERR_PADDING: "nonzero padding bits",
            _rice.ERR_TRAILING: "trailing bytes after final sample",
        }
        raise CorruptPayload(bitpos, reasons[status])
    return vals.reshape(cp.height, cp.width)


_REGISTRY: dict[str, tuple[Callable, Callable]] = {}


def register_plane_codec(codec_id: str,
                         encode: Callable[[np.ndarray], CodedPlane],
                         decode: Callable[[CodedPlane], np.ndarray]) -> None:
    if len(codec_id) != 4 or not codec_id.isascii():
        raise ValueError("codec id must be 4 ASCII characters")
    if codec_id in _REGISTRY:
        raise ValueError(f"codec {codec_id!r} already registered")
    _REGISTRY[codec_id] = (encode, decode)


register_plane_codec(RAW_ID, encode_plane_raw, _decode_raw)
register_plane_codec(MEDRICE_ID, encode_plane_medrice, _decode_medrice)


def encode_plane(plane: np.ndarray, codec_id: str) -> CodedPlane:
    if codec_id not in _REGISTRY:
        raise UnknownCodec(codec_id)
    return _REGISTRY[codec_id][0](plane)


def decode_plane(cp: CodedPlane) -> np.ndarray:
    if cp.codec_id not in _REGISTRY:
        raise UnknownCodec(cp.codec_id)
    return _REGISTRY[cp.codec_id][1](cp)

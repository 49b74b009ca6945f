"""Histogram construction, sparseness, and histogram packing.

Packing remaps the used sample values of a plane onto dense indices
0..N-1; the strictly increasing unpacking table realizes the inverse.
Tables travel as delta-coded varints inside a raw DEFLATE stream.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CorruptTable, EmptyPlane, IndexOutOfTable, ValueNotInTable

_DEFLATE_LEVEL = 9
_MAX_VARINT_BYTES = 10  # enough for any u64
_MAX_TABLE_PAYLOAD = 64 << 20  # decompression cap; real tables are a few MB at most


@dataclass(frozen=True)
class Histogram:
    """Sparse value -> count map over one plane."""

    counts: dict[int, int]
    total: int


@dataclass(frozen=True)
class Sparseness:
    """Used-bin ratio of a histogram: alpha = |X| / (max - min + 1).

    alpha = 1 means every bin in the occupied span is used (dense);
    smaller alpha means more empty bins. ``used_bins`` and ``span`` keep
    the exact rational value.
    """

    used_bins: int
    span: int
    alpha: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", self.used_bins / self.span)

    def as_fraction(self) -> Fraction:
        return Fraction(self.used_bins, self.span)

    @property
    def emptiness(self) -> float:
        """1 - alpha: the share of empty bins in the occupied span."""
        return 1.0 - self.alpha


@dataclass(frozen=True)
class UnpackingTable:
    """Strictly increasing original sample values; index i <-> values[i]."""

    values: np.ndarray  # int64, strictly increasing, length >= 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        if v.ndim != 1 or v.size == 0:
            raise CorruptTable("table must hold at least one value")
        if v.size > 1 and not (np.diff(v) > 0).all():
            raise CorruptTable("values not strictly increasing")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return int(self.values.size)

    def __eq__(self, other):
        return isinstance(other, UnpackingTable) and np.array_equal(self.values, other.values)


def build_histogram(plane: np.ndarray) -> Histogram:
    p = np.asarray(plane)
    if p.size == 0:
        raise EmptyPlane("cannot build a histogram of an empty plane")
    values, counts = np.unique(p.astype(np.int64), return_counts=True)
    return Histogram({int(v): int(c) for v, c in zip(values, counts)}, int(p.size))


def sparseness(h: Histogram) -> Sparseness:
    if not h.counts:
        raise EmptyPlane("histogram has no entries")
    keys = h.counts.keys()
    span = max(keys) - min(keys) + 1
    return Sparseness(used_bins=len(h.counts), span=span)


def build_packing(h: Histogram) -> UnpackingTable:
    if not h.counts:
        raise EmptyPlane("histogram has no entries")
    return UnpackingTable(np.array(sorted(h.counts.keys()), dtype=np.int64))


def pack_plane(plane: np.ndarray, table: UnpackingTable) -> np.ndarray:
    """Map every sample to its table index; the result is dense (alpha = 1)."""
    p = np.asarray(plane).astype(np.int64)
    idx = np.searchsorted(table.values, p)
    bad = (idx >= len(table)) | (table.values[np.minimum(idx, len(table) - 1)] != p)
    if bad.any():
        pos = int(np.flatnonzero(bad.ravel())[0])
        raise ValueNotInTable(int(p.ravel()[pos]), pos)
    return idx


def unpack_plane(indices: np.ndarray, table: UnpackingTable) -> np.ndarray:
    ip = np.asarray(indices).astype(np.int64)
    if ip.size and (ip.min() < 0 or ip.max() >= len(table)):
        raise IndexOutOfTable(f"index outside [0, {len(table)})")
    return table.values[ip]


def _encode_varints(values: np.ndarray) -> bytes:
    """LEB128-encode an array of non-negative integers (vectorized)."""
    v = np.asarray(values, dtype=np.uint64)
    nbytes = np.ones(v.shape, dtype=np.int64)
    rest = v >> np.uint64(7)
    while rest.any():
        nbytes += (rest != 0)
        rest >>= np.uint64(7)
    offsets = np.concatenate(([0], np.cumsum(nbytes)))
    out = np.zeros(int(offsets[-1]), dtype=np.uint8)
    for j in range(_MAX_VARINT_BYTES):
        mask = nbytes > j
        if not mask.any():
            break
        byte = ((v[mask] >> np.uint64(7 * j)) & np.uint64(0x7F)).astype(np.uint8)
        cont = (nbytes[mask] > j + 1).astype(np.uint8) << 7
        out[offsets[:-1][mask] + j] = byte | cont
    return out.tobytes()


def _decode_varints(payload: bytes, start: int, count: int) -> tuple[np.ndarray, int]:
    """Decode exactly ``count`` LEB128 values from ``payload[start:]``."""
    arr = np.frombuffer(payload, dtype=np.uint8)[start:]
    ends = np.flatnonzero((arr & 0x80) == 0)
    if len(ends) < count:
        raise CorruptTable("truncated varint")
    ends = ends[:count]
    starts = np.concatenate(([0], ends[:-1] + 1))
    lengths = ends - starts + 1
    if (lengths > _MAX_VARINT_BYTES).any():
        raise CorruptTable("varint too long")
    values = np.zeros(count, dtype=np.uint64)
    for j in range(int(lengths.max())):
        mask = lengths > j
        values[mask] |= (arr[starts[mask] + j] & np.uint64(0x7F)).astype(np.uint64) << np.uint64(7 * j)
    return values, start + int(ends[-1]) + 1


def _zigzag(x: int) -> int:
    return (x << 1) ^ (x >> 63)


def _unzigzag(u: int) -> int:
    return (u >> 1) ^ -(u & 1)


def serialize_table(table: UnpackingTable) -> bytes:
    """varint(N), zigzag-varint(first), varint(delta - 1)...; then DEFLATE.

    Strict monotonicity makes every delta >= 1, so delta - 1 biases the
    common consecutive-values case down to zero bytes of entropy.
    """
    values = table.values
    if int(values[0]) < -(1 << 31) or int(values[-1]) >= (1 << 31):
        raise ValueError("table values must fit in signed 32 bits")
    head = np.array([len(values), _zigzag(int(values[0]))], dtype=np.uint64)
    deltas = (np.diff(values) - 1).astype(np.uint64)
    payload = _encode_varints(np.concatenate((head, deltas)))
    comp = zlib.compressobj(_DEFLATE_LEVEL, zlib.DEFLATED, -zlib.MAX_WBITS)
    return comp.compress(payload) + comp.flush()


def deserialize_table(data: bytes) -> UnpackingTable:
    """Exact inverse of serialize_table; rejects any malformed stream."""
    try:
        d = zlib.decompressobj(-zlib.MAX_WBITS)
        payload = d.decompress(data, _MAX_TABLE_PAYLOAD)
        payload += d.flush()
        if d.unconsumed_tail:
            raise CorruptTable("table payload implausibly large")
        if not d.eof or d.unused_data:
            raise CorruptTable("trailing or unterminated DEFLATE data")
    except zlib.error as e:
        raise CorruptTable(f"bad DEFLATE stream: {e}") from None

    head, pos = _decode_varints(payload, 0, 2)
    n = int(head[0])
    if n < 1:
        raise CorruptTable("empty table")
    if n + 1 > len(payload):  # every value costs at least one byte
        raise CorruptTable("declared size impossible for payload")
    first = _unzigzag(int(head[1]))
    if not -(1 << 31) <= first < (1 << 31):
        raise CorruptTable("table value outside signed 32-bit domain")
    if n > 1:
        deltas, pos = _decode_varints(payload, pos, n - 1)
        # delta cap keeps the cumsum below 2^62 even at the payload size cap
        if (deltas >= (1 << 32)).any():
            raise CorruptTable("table delta outside signed 32-bit domain")
        sums = np.cumsum(deltas.astype(np.int64) + 1)
        values = np.concatenate(([first], first + sums))
        if int(values[-1]) >= (1 << 31):
            raise CorruptTable("table value outside signed 32-bit domain")
    else:
        values = np.array([first], dtype=np.int64)
    if pos != len(payload):
        raise CorruptTable("trailing bytes after table data")
    return UnpackingTable(values.astype(np.int64))

"""Huffman code table construction (ITU-T T.81 Annex C / F.2.2.3)."""
from __future__ import annotations

import numpy as np

from .tables import HuffmanSpec


def build_encode_table(spec: HuffmanSpec) -> tuple[np.ndarray, np.ndarray]:
    """Return (code, size) arrays indexed by symbol; size 0 = absent symbol."""
    sizes = []
    for length, count in enumerate(spec.bits, start=1):
        sizes.extend([length] * count)
    if len(sizes) != len(spec.values):
        raise ValueError("BITS total does not match HUFFVAL length")

    codes = np.zeros(256, dtype=np.uint32)
    lens = np.zeros(256, dtype=np.uint8)
    code = 0
    prev = sizes[0] if sizes else 0
    for sym, size in zip(spec.values, sizes):
        if size > prev:
            code <<= size - prev
            prev = size
        codes[sym] = code
        lens[sym] = size
        code += 1
    return codes, lens


def build_decode_table(spec: HuffmanSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (mincode, maxcode, valptr, huffval) arrays for the F.2.2.3 decoder.

    Indexed by code length 1..16; maxcode is -1 for lengths with no codes.
    """
    huffsize = []
    for length, count in enumerate(spec.bits, start=1):
        huffsize.extend([length] * count)

    huffcode = []
    code = 0
    prev = huffsize[0] if huffsize else 0
    for size in huffsize:
        if size > prev:
            code <<= size - prev
            prev = size
        huffcode.append(code)
        code += 1

    mincode = np.zeros(17, dtype=np.int64)
    maxcode = np.full(17, -1, dtype=np.int64)
    valptr = np.zeros(17, dtype=np.int64)
    p = 0
    for length, count in enumerate(spec.bits, start=1):
        if count:
            valptr[length] = p
            mincode[length] = huffcode[p]
            p += count
            maxcode[length] = huffcode[p - 1]

    huffval = np.zeros(256, dtype=np.int64)
    huffval[: len(spec.values)] = spec.values
    return mincode, maxcode, valptr, huffval


def spec_from_dht(bits: list[int], values: list[int]) -> HuffmanSpec:
    return HuffmanSpec(bits=tuple(bits), values=tuple(values))

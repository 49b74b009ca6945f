"""Entropy-coded scan kernels (numba-compiled).

These are the per-symbol sequential loops of baseline JPEG; everything
around them stays vectorized numpy. Coefficients travel as (nblocks, 64)
int32 arrays in zigzag order, blocks interleaved MCU-major / component-minor.
"""
from __future__ import annotations

import numba
import numpy as np

# decode_scan status codes
OK = 0
ERR_TRUNCATED = 1
ERR_BAD_CODE = 2
ERR_COEF_OVERFLOW = 3
ERR_MAGNITUDE = 4


@numba.njit(cache=True)
def encode_scan(coefs, ncomp, dc_codes, dc_sizes, ac_codes, ac_sizes, dc_sel, ac_sel):
    """Huffman-encode interleaved blocks; returns (buffer, nbytes).

    Emitted bytes include 0x00 stuffing after every 0xFF; final partial
    byte is padded with 1 bits.
    """
    nblocks = coefs.shape[0]
    buf = np.zeros(nblocks * 420 + 64, dtype=np.uint8)
    pos = 0
    acc = 0
    nacc = 0
    preds = np.zeros(ncomp, dtype=np.int64)

    for b in range(nblocks):
        comp = b % ncomp
        dct = dc_sel[comp]
        act = ac_sel[comp]

        # DC: category symbol then magnitude bits
        dc = np.int64(coefs[b, 0])
        diff = dc - preds[comp]
        preds[comp] = dc
        mag = diff if diff >= 0 else -diff
        size = 0
        while mag > 0:
            mag >>= 1
            size += 1
        acc = (acc << dc_sizes[dct, size]) | dc_codes[dct, size]
        nacc += dc_sizes[dct, size]
        while nacc >= 8:
            byte = (acc >> (nacc - 8)) & 0xFF
            buf[pos] = byte
            pos += 1
            if byte == 0xFF:
                buf[pos] = 0
                pos += 1
            nacc -= 8
        if size > 0:
            v = diff if diff >= 0 else diff + (1 << size) - 1
            acc = (acc << size) | (v & ((1 << size) - 1))
            nacc += size
            while nacc >= 8:
                byte = (acc >> (nacc - 8)) & 0xFF
                buf[pos] = byte
                pos += 1
                if byte == 0xFF:
                    buf[pos] = 0
                    pos += 1
                nacc -= 8

        # AC: run/size symbols with ZRL and EOB
        run = 0
        for k in range(1, 64):
            val = np.int64(coefs[b, k])
            if val == 0:
                run += 1
                continue
            while run > 15:
                acc = (acc << ac_sizes[act, 0xF0]) | ac_codes[act, 0xF0]
                nacc += ac_sizes[act, 0xF0]
                while nacc >= 8:
                    byte = (acc >> (nacc - 8)) & 0xFF
                    buf[pos] = byte
                    pos += 1
                    if byte == 0xFF:
                        buf[pos] = 0
                        pos += 1
                    nacc -= 8
                run -= 16
            mag = val if val >= 0 else -val
            size = 0
            while mag > 0:
                mag >>= 1
                size += 1
            sym = (run << 4) | size
            acc = (acc << ac_sizes[act, sym]) | ac_codes[act, sym]
            nacc += ac_sizes[act, sym]
            v = val if val >= 0 else val + (1 << size) - 1
            acc = (acc << size) | (v & ((1 << size) - 1))
            nacc += size
            while nacc >= 8:
                byte = (acc >> (nacc - 8)) & 0xFF
                buf[pos] = byte
                pos += 1
                if byte == 0xFF:
                    buf[pos] = 0
                    pos += 1
                nacc -= 8
            run = 0
        if run > 0:  # trailing zeros: EOB
            acc = (acc << ac_sizes[act, 0x00]) | ac_codes[act, 0x00]
            nacc += ac_sizes[act, 0x00]
            while nacc >= 8:
                byte = (acc >> (nacc - 8)) & 0xFF
                buf[pos] = byte
                pos += 1
                if byte == 0xFF:
                    buf[pos] = 0
                    pos += 1
                nacc -= 8

    if nacc > 0:
        pad = 8 - nacc
        acc = (acc << pad) | ((1 << pad) - 1)
        byte = acc & 0xFF
        buf[pos] = byte
        pos += 1
        if byte == 0xFF:
            buf[pos] = 0
            pos += 1
    return buf, pos


@numba.njit(cache=True)
def decode_scan(data, nblocks, ncomp,
                dc_min, dc_max, dc_valptr, dc_vals,
                ac_min, ac_max, ac_valptr, ac_vals,
                dc_sel, ac_sel):
    """Decode ``nblocks`` interleaved blocks from unstuffed entropy data.

    Returns (coefs, status, position); position is the bit offset of the
    failure when status != OK.
    """
    coefs = np.zeros((nblocks, 64), dtype=np.int32)
    nbits_total = data.shape[0] * 8
    bit = 0
    preds = np.zeros(ncomp, dtype=np.int64)

    for b in range(nblocks):
        comp = b % ncomp
        dct = dc_sel[comp]
        act = ac_sel[comp]

        # DC size category
        if bit >= nbits_total:
            return coefs, ERR_TRUNCATED, bit
        code = (data[bit >> 3] >> (7 - (bit & 7))) & 1
        bit += 1
        length = 1
        while code > dc_max[dct, length]:
            length += 1
            if length > 16 or bit >= nbits_total:
                return coefs, ERR_BAD_CODE if length > 16 else ERR_TRUNCATED, bit
            code = (code << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
            bit += 1
        size = dc_vals[dct, dc_valptr[dct, length] + code - dc_min[dct, length]]
        if size > 11:
            return coefs, ERR_MAGNITUDE, bit
        diff = 0
        if size > 0:
            if bit + size > nbits_total:
                return coefs, ERR_TRUNCATED, bit
            v = 0
            for _ in range(size):
                v = (v << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
                bit += 1
            if v < (1 << (size - 1)):
                v -= (1 << size) - 1
            diff = v
        preds[comp] += diff
        coefs[b, 0] = preds[comp]

        # AC coefficients
        k = 1
        while k < 64:
            if bit >= nbits_total:
                return coefs, ERR_TRUNCATED, bit
            code = (data[bit >> 3] >> (7 - (bit & 7))) & 1
            bit += 1
            length = 1
            while code > ac_max[act, length]:
                length += 1
                if length > 16 or bit >= nbits_total:
                    return coefs, ERR_BAD_CODE if length > 16 else ERR_TRUNCATED, bit
                code = (code << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
                bit += 1
            rs = ac_vals[act, ac_valptr[act, length] + code - ac_min[act, length]]
            run = rs >> 4
            size = rs & 0x0F
            if size == 0:
                if run == 15:
                    k += 16
                    continue
                break  # EOB
            k += run
            if k > 63:
                return coefs, ERR_COEF_OVERFLOW, bit
            if size > 10:
                return coefs, ERR_MAGNITUDE, bit
            if bit + size > nbits_total:
                return coefs, ERR_TRUNCATED, bit
            v = 0
            for _ in range(size):
                v = (v << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
                bit += 1
            if v < (1 << (size - 1)):
                v -= (1 << size) - 1
            coefs[b, k] = v
            k += 1

    return coefs, OK, bit

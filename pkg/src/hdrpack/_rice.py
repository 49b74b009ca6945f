"""MED + adaptive Golomb-Rice kernels (numba-compiled).

Format constants, fixed so streams are portable across implementations:

- prediction: median edge detector over left/top/top-left, out-of-bounds
  neighbors read as 0;
- residual e is zigzag-mapped to u = 2e (e >= 0) or -2e-1;
- Rice parameter k = position of the highest set bit of floor(A/N),
  recomputed before every sample from A (sum of previous u, init 4) and
  N (sample count, init 1);
- codeword: u >> k zeros, a 1 bit, then the k low bits of u;
- if u >= 2^(k+16) the quotient would need 2^16 or more zeros: emit
  exactly 2^16 zeros (the escape marker) followed by u verbatim in 32
  bits, no stop bit;
- the final byte is padded with zero bits.
"""
from __future__ import annotations

import numba
import numpy as np

ESCAPE_QUOTIENT = 1 << 16

OK = 0
ERR_TRUNCATED = 1
ERR_RANGE = 2
ERR_PADDING = 3
ERR_TRAILING = 4


@numba.njit(cache=True)
def _med(a, b, c):
    mx = a if a > b else b
    mn = a if a < b else b
    if c >= mx:
        return mn
    if c <= mn:
        return mx
    return a + b - c


@numba.njit(cache=True)
def encode(vals, width):
    """Encode a flat plane of non-negative int64 samples; returns (buf, nbytes)."""
    n = vals.shape[0]
    cap = n * 4 + 1024
    buf = np.zeros(cap, dtype=np.uint8)
    pos = 0
    acc = 0
    nacc = 0
    A = 4
    N = 1

    for i in range(n):
        # worst case one sample: 2^16 zeros + 32 bits + slack
        if pos + 8256 > cap:
            newcap = cap * 2 + 8256
            nb = np.zeros(newcap, dtype=np.uint8)
            nb[:pos] = buf[:pos]
            buf = nb
            cap = newcap

        x = vals[i]
        col = i % width
        a = vals[i - 1] if col > 0 else 0
        b = vals[i - width] if i >= width else 0
        c = vals[i - width - 1] if (col > 0 and i >= width) else 0
        e = x - _med(a, b, c)
        u = 2 * e if e >= 0 else -2 * e - 1

        mean = A // N
        k = 0
        while (mean >> (k + 1)) != 0:
            k += 1

        q = u >> k
        if q < ESCAPE_QUOTIENT:
            z = q
            while z >= 32:
                acc <<= 32
                nacc += 32
                while nacc >= 8:
                    buf[pos] = (acc >> (nacc - 8)) & 0xFF
                    pos += 1
                    nacc -= 8
                z -= 32
            acc = (acc << (z + 1)) | 1
            nacc += z + 1
            if k > 0:
                acc = (acc << k) | (u & ((1 << k) - 1))
                nacc += k
        else:
            z = ESCAPE_QUOTIENT
            while z >= 32:
                acc <<= 32
                nacc += 32
                while nacc >= 8:
                    buf[pos] = (acc >> (nacc - 8)) & 0xFF
                    pos += 1
                    nacc -= 8
                z -= 32
            acc = (acc << 32) | u
            nacc += 32
        while nacc >= 8:
            buf[pos] = (acc >> (nacc - 8)) & 0xFF
            pos += 1
            nacc -= 8

        A += u
        N += 1

    if nacc > 0:
        buf[pos] = (acc << (8 - nacc)) & 0xFF
        pos += 1
    return buf, pos


@numba.njit(cache=True)
def decode(data, n, width, max_index):
    """Decode n samples; returns (vals, status, bit_position)."""
    vals = np.zeros(n, dtype=np.int64)
    nbits = data.shape[0] * 8
    bit = 0
    A = 4
    N = 1

    for i in range(n):
        mean = A // N
        k = 0
        while (mean >> (k + 1)) != 0:
            k += 1

        q = 0
        while True:
            if q >= ESCAPE_QUOTIENT:
                break
            if bit >= nbits:
                return vals, ERR_TRUNCATED, bit
            b = (data[bit >> 3] >> (7 - (bit & 7))) & 1
            bit += 1
            if b == 1:
                break
            q += 1

        if q >= ESCAPE_QUOTIENT:
            if bit + 32 > nbits:
                return vals, ERR_TRUNCATED, bit
            u = 0
            for _ in range(32):
                u = (u << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
                bit += 1
        else:
            u = q << k
            if k > 0:
                if bit + k > nbits:
                    return vals, ERR_TRUNCATED, bit
                r = 0
                for _ in range(k):
                    r = (r << 1) | ((data[bit >> 3] >> (7 - (bit & 7))) & 1)
                    bit += 1
                u |= r

        e = (u >> 1) if (u & 1) == 0 else -((u + 1) >> 1)
        col = i % width
        a = vals[i - 1] if col > 0 else 0
        b2 = vals[i - width] if i >= width else 0
        c = vals[i - width - 1] if (col > 0 and i >= width) else 0
        x = _med(a, b2, c) + e
        if x < 0 or x > max_index:
            return vals, ERR_RANGE, bit
        vals[i] = x

        A += u
        N += 1

    # all remaining bits must be zero padding within the final byte
    if (nbits - bit) >= 8:
        return vals, ERR_TRAILING, bit
    while bit < nbits:
        if (data[bit >> 3] >> (7 - (bit & 7))) & 1:
            return vals, ERR_PADDING, bit
        bit += 1
    return vals, OK, bit

"""Fixed-point 8x8 DCT pair with fully specified integer rounding.

Scaled-integer transforms in the libjpeg "islow" style: 13-bit constants,
descale-with-round-half-up at the points noted below. Because every step
is exact int64 arithmetic, encoder-side and decoder-side reconstructions
agree bit for bit on any machine and for any thread count.

The forward transform emits coefficients scaled up by 8; quantization
divides by (table entry * 8), so quantized coefficients are at true scale.
"""
from __future__ import annotations

import numpy as np

CONST_BITS = 13
PASS1_BITS = 2

F_0_298631336 = 2446
F_0_390180644 = 3196
F_0_541196100 = 4433
F_0_765366865 = 6270
F_0_899976223 = 7373
F_1_175875602 = 9633
F_1_501321110 = 12299
F_1_847759065 = 15137
F_1_961570560 = 16069
F_2_053119869 = 16819
F_2_562915447 = 20995
F_3_072711026 = 25172


def _descale(x, n):
    # round half toward +inf, then arithmetic shift
    return (x + (1 << (n - 1))) >> n


def _fdct_1d(c, shift_up: bool, down: int):
    """One forward pass over 8 vectors; returns 8 output vectors."""
    tmp0 = c[0] + c[7]
    tmp7 = c[0] - c[7]
    tmp1 = c[1] + c[6]
    tmp6 = c[1] - c[6]
    tmp2 = c[2] + c[5]
    tmp5 = c[2] - c[5]
    tmp3 = c[3] + c[4]
    tmp4 = c[3] - c[4]

    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    if shift_up:
        o0 = (tmp10 + tmp11) << PASS1_BITS
        o4 = (tmp10 - tmp11) << PASS1_BITS
    else:
        o0 = _descale(tmp10 + tmp11, PASS1_BITS)
        o4 = _descale(tmp10 - tmp11, PASS1_BITS)

    z1 = (tmp12 + tmp13) * F_0_541196100
    o2 = _descale(z1 + tmp13 * F_0_765366865, down)
    o6 = _descale(z1 - tmp12 * F_1_847759065, down)

    z1 = tmp4 + tmp7
    z2 = tmp5 + tmp6
    z3 = tmp4 + tmp6
    z4 = tmp5 + tmp7
    z5 = (z3 + z4) * F_1_175875602

    tmp4 = tmp4 * F_0_298631336
    tmp5 = tmp5 * F_2_053119869
    tmp6 = tmp6 * F_3_072711026
    tmp7 = tmp7 * F_1_501321110
    z1 = z1 * -F_0_899976223
    z2 = z2 * -F_2_562915447
    z3 = z3 * -F_1_961570560 + z5
    z4 = z4 * -F_0_390180644 + z5

    o7 = _descale(tmp4 + z1 + z3, down)
    o5 = _descale(tmp5 + z2 + z4, down)
    o3 = _descale(tmp6 + z2 + z3, down)
    o1 = _descale(tmp7 + z1 + z4, down)
    return o0, o1, o2, o3, o4, o5, o6, o7


def fdct_blocks(blocks: np.ndarray) -> np.ndarray:
    """Forward DCT of level-shifted samples; (n, 8, 8) -> coefficients x8."""
    b = blocks.astype(np.int64, copy=False)
    rows = _fdct_1d([b[:, :, i] for i in range(8)], True, CONST_BITS - PASS1_BITS)
    w = np.stack(rows, axis=2)
    cols = _fdct_1d([w[:, i, :] for i in range(8)], False, CONST_BITS + PASS1_BITS)
    return np.stack(cols, axis=1)


def _idct_1d(p, down: int):
    """One inverse pass over 8 vectors; returns 8 output vectors."""
    z2 = p[2]
    z3 = p[6]
    z1 = (z2 + z3) * F_0_541196100
    tmp2 = z1 - z3 * F_1_847759065
    tmp3 = z1 + z2 * F_0_765366865

    z2 = p[0]
    z3 = p[4]
    tmp0 = (z2 + z3) << CONST_BITS
    tmp1 = (z2 - z3) << CONST_BITS

    tmp10 = tmp0 + tmp3
    tmp13 = tmp0 - tmp3
    tmp11 = tmp1 + tmp2
    tmp12 = tmp1 - tmp2

    t0 = p[7]
    t1 = p[5]
    t2 = p[3]
    t3 = p[1]
    z1 = t0 + t3
    z2 = t1 + t2
    z3 = t0 + t2
    z4 = t1 + t3
    z5 = (z3 + z4) * F_1_175875602

    t0 = t0 * F_0_298631336
    t1 = t1 * F_2_053119869
    t2 = t2 * F_3_072711026
    t3 = t3 * F_1_501321110
    z1 = z1 * -F_0_899976223
    z2 = z2 * -F_2_562915447
    z3 = z3 * -F_1_961570560 + z5
    z4 = z4 * -F_0_390180644 + z5

    t0 = t0 + z1 + z3
    t1 = t1 + z2 + z4
    t2 = t2 + z2 + z3
    t3 = t3 + z1 + z4

    return (
        _descale(tmp10 + t3, down),
        _descale(tmp11 + t2, down),
        _descale(tmp12 + t1, down),
        _descale(tmp13 + t0, down),
        _descale(tmp13 - t0, down),
        _descale(tmp12 - t1, down),
        _descale(tmp11 - t2, down),
        _descale(tmp10 - t3, down),
    )


def idct_blocks(coefs: np.ndarray) -> np.ndarray:
    """Inverse DCT of dequantized coefficients; output still level-shifted."""
    c = coefs.astype(np.int64, copy=False)
    cols = _idct_1d([c[:, i, :] for i in range(8)], CONST_BITS - PASS1_BITS)
    w = np.stack(cols, axis=1)
    rows = _idct_1d([w[:, :, i] for i in range(8)], CONST_BITS + PASS1_BITS + 3)
    return np.stack(rows, axis=2)


def quantize_blocks(coefs8: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    """Divide x8-scaled coefficients by the table, rounding half away from zero."""
    q8 = qtable.astype(np.int64) * 8
    mag = (np.abs(coefs8) + (q8 >> 1)) // q8
    return np.where(coefs8 < 0, -mag, mag)


def dequantize_blocks(quantized: np.ndarray, qtable: np.ndarray) -> np.ndarray:
    return quantized.astype(np.int64, copy=False) * qtable.astype(np.int64)

"""Baseline JPEG encoder/decoder (ISO/IEC 10918-1 interchange format).

Deliberately small subset: 8-bit samples, 4:4:4 sampling, one interleaved
scan, Huffman coding, no restart markers. The decoder is shared by the
codec's encode path (residuals are computed against the decoded base
layer), so everything here is integer-specified and bit-reproducible.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, MalformedStream, UnsupportedFeature
from ..tmo import LdrImage, validate_ldr
from . import _scan
from .dct import dequantize_blocks, fdct_blocks, idct_blocks, quantize_blocks
from .huffman import build_decode_table, build_encode_table, spec_from_dht
from .tables import (
    BASE_CHROMA_QUANT,
    BASE_LUMA_QUANT,
    CHROMA_AC,
    CHROMA_DC,
    LUMA_AC,
    LUMA_DC,
    ZIGZAG_ORDER,
)

M_SOI = 0xD8
M_EOI = 0xD9
M_SOS = 0xDA
M_DQT = 0xDB
M_DHT = 0xC4
M_DRI = 0xDD
M_APP0 = 0xE0
M_COM = 0xFE

JFIF_HEADER = b"JFIF\x00" + bytes([1, 2, 0, 0, 1, 0, 1, 0, 0])


@dataclass(frozen=True)
class QualityFactor:
    """Base-layer quality; out-of-range values are clamped into [1, 100]."""

    q: int

    def __post_init__(self):
        object.__setattr__(self, "q", min(100, max(1, int(self.q))))


def quality_to_tables(q) -> tuple[np.ndarray, np.ndarray]:
    """Scale the Annex K base tables by the conventional quality curve."""
    if not isinstance(q, QualityFactor):
        q = QualityFactor(q)
    scale = 5000 // q.q if q.q < 50 else 200 - 2 * q.q
    out = []
    for base in (BASE_LUMA_QUANT, BASE_CHROMA_QUANT):
        t = (base * scale + 50) // 100
        out.append(np.clip(t, 1, 255).astype(np.int64))
    return out[0], out[1]


# Fixed-point RGB <-> YCbCr (JFIF), 16 fractional bits, round half up.

def rgb_to_ycbcr(r: np.ndarray, g: np.ndarray, b: np.ndarray):
    r = r.astype(np.int64)
    g = g.astype(np.int64)
    b = b.astype(np.int64)
    y = (19595 * r + 38470 * g + 7471 * b + 32768) >> 16
    cb = (-11059 * r - 21709 * g + 32768 * b + (128 << 16) + 32768) >> 16
    cr = (32768 * r - 27439 * g - 5329 * b + (128 << 16) + 32768) >> 16
    clip = lambda x: np.clip(x, 0, 255).astype(np.uint8)
    return clip(y), clip(cb), clip(cr)


def ycbcr_to_rgb(y: np.ndarray, cb: np.ndarray, cr: np.ndarray):
    y = y.astype(np.int64)
    cb = cb.astype(np.int64) - 128
    cr = cr.astype(np.int64) - 128
    r = y + ((91881 * cr + 32768) >> 16)
    g = y - ((22554 * cb + 46802 * cr + 32768) >> 16)
    b = y + ((116130 * cb + 32768) >> 16)
    clip = lambda x: np.clip(x, 0, 255).astype(np.uint8)
    return clip(r), clip(g), clip(b)


def _pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph = (-h) % 8
    pw = (-w) % 8
    if ph or pw:
        plane = np.pad(plane, ((0, ph), (0, pw)), mode="edge")
    return plane


def _plane_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    return (
        plane.reshape(h // 8, 8, w // 8, 8)
        .transpose(0, 2, 1, 3)
        .reshape(-1, 8, 8)
    )


def _blocks_to_plane(blocks: np.ndarray, h8: int, w8: int) -> np.ndarray:
    return (
        blocks.reshape(h8 // 8, w8 // 8, 8, 8)
        .transpose(0, 2, 1, 3)
        .reshape(h8, w8)
    )


def _segment(marker: int, payload: bytes) -> bytes:
    return struct.pack(">BBH", 0xFF, marker, len(payload) + 2) + payload


_ENC_TABLES = None


def _encode_tables():
    """Standard-table encode arrays shaped for the scan kernel (cached)."""
    global _ENC_TABLES
    if _ENC_TABLES is None:
        dc_codes = np.zeros((2, 256), dtype=np.int64)
        dc_sizes = np.zeros((2, 256), dtype=np.int64)
        ac_codes = np.zeros((2, 256), dtype=np.int64)
        ac_sizes = np.zeros((2, 256), dtype=np.int64)
        for i, spec in enumerate((LUMA_DC, CHROMA_DC)):
            c, s = build_encode_table(spec)
            dc_codes[i] = c
            dc_sizes[i] = s
        for i, spec in enumerate((LUMA_AC, CHROMA_AC)):
            c, s = build_encode_table(spec)
            ac_codes[i] = c
            ac_sizes[i] = s
        _ENC_TABLES = (dc_codes, dc_sizes, ac_codes, ac_sizes)
    return _ENC_TABLES


def jpeg_encode(ldr: LdrImage, q) -> bytes:
    """Encode an LDR image as a baseline 4:4:4 JFIF JPEG."""
    validate_ldr(ldr)
    if ldr.width > 65535 or ldr.height > 65535:
        raise DimensionMismatch("JPEG dimensions are limited to 65535")
    if not isinstance(q, QualityFactor):
        q = QualityFactor(q)
    qluma, qchroma = quality_to_tables(q)

    ycc = rgb_to_ycbcr(*ldr.planes)
    qtabs = (qluma, qchroma, qchroma)
    zz_per_comp = []
    for plane, qtab in zip(ycc, qtabs):
        blocks = _plane_to_blocks(_pad_to_blocks(plane)).astype(np.int64) - 128
        quant = quantize_blocks(fdct_blocks(blocks), qtab)
        zz_per_comp.append(quant.reshape(-1, 64)[:, ZIGZAG_ORDER])

    n_mcus = zz_per_comp[0].shape[0]
    coefs = np.empty((n_mcus * 3, 64), dtype=np.int32)
    for c in range(3):
        coefs[c::3] = zz_per_comp[c]

    dc_codes, dc_sizes, ac_codes, ac_sizes = _encode_tables()
    sel = np.array([0, 1, 1], dtype=np.int64)
    buf, nbytes = _scan.encode_scan(
        coefs, 3, dc_codes, dc_sizes, ac_codes, ac_sizes, sel, sel
    )
    entropy = buf[:nbytes].tobytes()

    parts = [bytes([0xFF, M_SOI])]
    parts.append(_segment(M_APP0, JFIF_HEADER))

    dqt = b""
    for tid, tab in ((0, qluma), (1, qchroma)):
        dqt += bytes([tid]) + bytes(int(v) for v in tab.ravel()[ZIGZAG_ORDER])
    parts.append(_segment(M_DQT, dqt))

    sof = struct.pack(">BHHB", 8, ldr.height, ldr.width, 3)
    for cid, qsel in ((1, 0), (2, 1), (3, 1)):
        sof += bytes([cid, 0x11, qsel])
    parts.append(_segment(0xC0, sof))

    dht = b""
    for tc, th, spec in ((0, 0, LUMA_DC), (1, 0, LUMA_AC), (0, 1, CHROMA_DC), (1, 1, CHROMA_AC)):
        dht += bytes([tc << 4 | th]) + bytes(spec.bits) + bytes(spec.values)
    parts.append(_segment(M_DHT, dht))

    sos = bytes([3])
    for cid, tsel in ((1, 0x00), (2, 0x11), (3, 0x11)):
        sos += bytes([cid, tsel])
    sos += bytes([0, 63, 0])
    parts.append(_segment(M_SOS, sos))

    parts.append(entropy)
    parts.append(bytes([0xFF, M_EOI]))
    return b"".join(parts)


class _FrameState:
    def __init__(self):
        self.qtables: dict[int, np.ndarray] = {}
        self.dc_specs: dict[int, object] = {}
        self.ac_specs: dict[int, object] = {}
        self.width = 0
        self.height = 0
        self.components: list[tuple[int, int]] = []  # (component id, quant table id)


def _parse_dqt(payload: bytes, offset: int, state: _FrameState) -> None:
    pos = 0
    while pos < len(payload):
        pq_tq = payload[pos]
        pq, tq = pq_tq >> 4, pq_tq & 0x0F
        pos += 1
        if pq != 0:
            raise UnsupportedFeature("16-bit quantization tables")
        if tq > 3 or pos + 64 > len(payload):
            raise MalformedStream(offset + pos, "bad DQT entry")
        zz = np.frombuffer(payload[pos : pos + 64], dtype=np.uint8).astype(np.int64)
        natural = np.zeros(64, dtype=np.int64)
        natural[ZIGZAG_ORDER] = zz
        state.qtables[tq] = natural.reshape(8, 8)
        pos += 64


def _parse_dht(payload: bytes, offset: int, state: _FrameState) -> None:
    pos = 0
    while pos < len(payload):
        tc_th = payload[pos]
        tc, th = tc_th >> 4, tc_th & 0x0F
        pos += 1
        if tc > 1 or th > 3:
            raise MalformedStream(offset + pos, "bad DHT class/slot")
        if pos + 16 > len(payload):
            raise MalformedStream(offset + pos, "truncated DHT")
        bits = list(payload[pos : pos + 16])
        pos += 16
        count = sum(bits)
        if count > 256:
            raise MalformedStream(offset + pos, "DHT declares more than 256 symbols")
        if pos + count > len(payload):
            raise MalformedStream(offset + pos, "truncated DHT values")
        values = list(payload[pos : pos + count])
        pos += count
        spec = spec_from_dht(bits, values)
        (state.dc_specs if tc == 0 else state.ac_specs)[th] = spec


def _parse_sof0(payload: bytes, offset: int, state: _FrameState) -> None:
    if len(payload) < 6:
        raise MalformedStream(offset, "truncated SOF0")
    precision, height, width, ncomp = struct.unpack(">BHHB", payload[:6])
    if precision != 8:
        raise UnsupportedFeature(f"{precision}-bit sample precision")
    if ncomp not in (1, 3):
        raise UnsupportedFeature(f"{ncomp}-component images")
    if width == 0 or height == 0:
        raise MalformedStream(offset, "zero image dimension")
    if len(payload) != 6 + 3 * ncomp:
        raise MalformedStream(offset, "bad SOF0 length")
    state.width = width
    state.height = height
    for i in range(ncomp):
        cid, sampling, tq = payload[6 + 3 * i : 9 + 3 * i]
        if sampling != 0x11:
            raise UnsupportedFeature("subsampled chroma")
        state.components.append((cid, tq))


def jpeg_decode(data: bytes) -> LdrImage:
    """Deterministic baseline decode to planar RGB.

    Both the encoder loop and the file decoder call this, so the exact
    integer IDCT and color conversion here define the reconstruction.
    """
    if len(data) < 4 or data[0] != 0xFF or data[1] != M_SOI:
        raise MalformedStream(0, "missing SOI")
    state = _FrameState()
    pos = 2
    sof_seen = False
    scan = None

    while True:
        if pos + 2 > len(data):
            raise MalformedStream(pos, "truncated stream (no EOI)")
        if data[pos] != 0xFF:
            raise MalformedStream(pos, f"expected marker, found 0x{data[pos]:02x}")
        marker = data[pos + 1]
        pos += 2
        while marker == 0xFF:  # fill bytes are legal
            if pos >= len(data):
                raise MalformedStream(pos, "truncated stream (no EOI)")
            marker = data[pos]
            pos += 1

        if marker == M_EOI:
            raise MalformedStream(pos - 2, "EOI before scan data")
        if marker in (0xC2, 0xC1, 0xC3, 0xC5, 0xC6, 0xC7, 0xC9, 0xCA, 0xCB, 0xCD, 0xCE, 0xCF):
            raise UnsupportedFeature("only baseline sequential DCT (SOF0) is supported")

        if pos + 2 > len(data):
            raise MalformedStream(pos, "truncated segment header")
        seg_len = struct.unpack(">H", data[pos : pos + 2])[0]
        if seg_len < 2 or pos + seg_len > len(data):
            raise MalformedStream(pos, "segment length out of bounds")
        payload = data[pos + 2 : pos + seg_len]
        seg_start = pos
        pos += seg_len

        if marker == M_DQT:
            _parse_dqt(payload, seg_start, state)
        elif marker == M_DHT:
            _parse_dht(payload, seg_start, state)
        elif marker == 0xC0:
            if sof_seen:
                raise MalformedStream(seg_start, "multiple SOF0")
            _parse_sof0(payload, seg_start, state)
            sof_seen = True
        elif marker == M_DRI:
            if len(payload) != 2:
                raise MalformedStream(seg_start, "bad DRI length")
            if struct.unpack(">H", payload)[0] != 0:
                raise UnsupportedFeature("restart markers")
        elif marker == M_SOS:
            if not sof_seen:
                raise MalformedStream(seg_start, "SOS before SOF0")
            scan = _decode_sos(data, payload, seg_start, pos, state)
            pos = scan[1]
            break
        elif marker == 0xCC:
            raise UnsupportedFeature("arithmetic coding")
        # APPn / COM / others: skipped

    # after the scan, expect EOI (fill bytes allowed)
    if pos + 2 > len(data) or data[pos] != 0xFF:
        raise MalformedStream(pos, "expected EOI after scan")
    marker = data[pos + 1]
    p2 = pos + 2
    while marker == 0xFF:
        if p2 >= len(data):
            raise MalformedStream(p2, "truncated stream (no EOI)")
        marker = data[p2]
        p2 += 1
    if marker != M_EOI:
        raise UnsupportedFeature("multiple scans are not supported")
    return scan[0]


def _decode_sos(data: bytes, payload: bytes, seg_start: int, scan_start: int,
                state: _FrameState) -> tuple[LdrImage, int]:
    if not payload:
        raise MalformedStream(seg_start, "empty SOS header")
    ns = payload[0]
    if ns != len(state.components):
        raise UnsupportedFeature("non-interleaved scans")
    if len(payload) != 1 + 2 * ns + 3:
        raise MalformedStream(seg_start, "bad SOS length")
    comp_tables = []
    for i in range(ns):
        cid, tsel = payload[1 + 2 * i : 3 + 2 * i]
        if cid != state.components[i][0]:
            raise MalformedStream(seg_start, "scan/frame component mismatch")
        comp_tables.append((tsel >> 4, tsel & 0x0F))
    ss, se, a = payload[1 + 2 * ns : 4 + 2 * ns]
    if ss != 0 or se != 63 or a != 0:
        raise UnsupportedFeature("spectral selection / successive approximation")

    # entropy data runs until the next real marker
    end = scan_start
    n = len(data)
    while True:
        if end + 1 >= n:
            raise MalformedStream(end, "truncated stream (no EOI)")
        if data[end] == 0xFF and data[end + 1] != 0x00:
            if 0xD0 <= data[end + 1] <= 0xD7:
                raise UnsupportedFeature("restart markers")
            break
        end += 1
    entropy = data[scan_start:end].replace(b"\xff\x00", b"\xff")

    ncomp = ns
    h8 = state.height + ((-state.height) % 8)
    w8 = state.width + ((-state.width) % 8)
    n_mcus = (h8 // 8) * (w8 // 8)

    dc_min = np.full((4, 17), -1, dtype=np.int64)
    dc_max = np.full((4, 17), -1, dtype=np.int64)
    dc_valptr = np.zeros((4, 17), dtype=np.int64)
    dc_vals = np.zeros((4, 256), dtype=np.int64)
    ac_min = np.full((4, 17), -1, dtype=np.int64)
    ac_max = np.full((4, 17), -1, dtype=np.int64)
    ac_valptr = np.zeros((4, 17), dtype=np.int64)
    ac_vals = np.zeros((4, 256), dtype=np.int64)
    dc_sel = np.zeros(ncomp, dtype=np.int64)
    ac_sel = np.zeros(ncomp, dtype=np.int64)
    for i, (td, ta) in enumerate(comp_tables):
        if td not in state.dc_specs or ta not in state.ac_specs:
            raise MalformedStream(seg_start, f"missing Huffman table {td}/{ta}")
        mn, mx, vp, hv = build_decode_table(state.dc_specs[td])
        dc_min[td], dc_max[td], dc_valptr[td], dc_vals[td] = mn, mx, vp, hv
        mn, mx, vp, hv = build_decode_table(state.ac_specs[ta])
        ac_min[ta], ac_max[ta], ac_valptr[ta], ac_vals[ta] = mn, mx, vp, hv
        dc_sel[i] = td
        ac_sel[i] = ta

    coefs, status, bitpos = _scan.decode_scan(
        np.frombuffer(entropy, dtype=np.uint8), n_mcus * ncomp, ncomp,
        dc_min, dc_max, dc_valptr, dc_vals,
        ac_min, ac_max, ac_valptr, ac_vals,
        dc_sel, ac_sel,
    )
    if status != _scan.OK:
        reasons = {
            _scan.ERR_TRUNCATED: "entropy data ends early",
            _scan.ERR_BAD_CODE: "invalid Huffman code",
            _scan.ERR_COEF_OVERFLOW: "AC run past end of block",
            _scan.ERR_MAGNITUDE: "coefficient magnitude out of range",
        }
        raise MalformedStream(scan_start + (bitpos >> 3), reasons[status])

    planes = []
    for c in range(ncomp):
        tq = state.components[c][1]
        if tq not in state.qtables:
            raise MalformedStream(seg_start, f"missing quantization table {tq}")
        zz = coefs[c::ncomp].astype(np.int64)
        natural = np.zeros_like(zz)
        natural[:, ZIGZAG_ORDER] = zz
        blocks = natural.reshape(-1, 8, 8)
        spatial = idct_blocks(dequantize_blocks(blocks, state.qtables[tq])) + 128
        plane = _blocks_to_plane(np.clip(spatial, 0, 255).astype(np.uint8), h8, w8)
        planes.append(plane[: state.height, : state.width])

    if ncomp == 1:  # grayscale: Cb = Cr = 128
        y = planes[0]
        flat = np.full_like(y, 128)
        r, g, b = ycbcr_to_rgb(y, flat, flat)
    else:
        r, g, b = ycbcr_to_rgb(*planes)
    return LdrImage(state.width, state.height, (r, g, b)), end

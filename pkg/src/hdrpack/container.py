"""Single-file container: base JPEG plus extension payloads in APP11 segments.

Payloads are chunked into APP11 (0xFFEB) segments inserted right after the
JFIF APP0 marker, each carrying the private magic "HP10" so foreign APP11
users never collide. Stripping every HP10 segment yields the base JPEG
byte-identically, which is the whole backward-compatibility story: legacy
decoders skip APP11 and see a plain baseline JPEG.

Segment body layout (lengths in parentheses):
    "HP10"(4) box_type(4) component_index(1) seq_no(2 BE) seq_total(2 BE) chunk
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptSegment,
    CorruptTable,
    DuplicateChunk,
    InvalidBaseStream,
    LegacyOnlyFile,
    MissingChunk,
    PayloadSetIncomplete,
    RangeViolation,
)
from .extcodec import MEDRICE_ID, CodedPlane, decode_plane, encode_plane
from .histpack import (
    Sparseness,
    build_histogram,
    build_packing,
    deserialize_table,
    pack_plane,
    serialize_table,
    sparseness,
    unpack_plane,
)
from .jpeg import QualityFactor, jpeg_decode, jpeg_encode
from .model import HALF_FLOAT, HdrImage, PixelType
from .residual import (
    build_inverse_lut,
    compute_residual,
    predict,
    rct_forward,
    rct_inverse,
    reconstruct,
)
from .tmo import TmoKind, TmoParams, default_tmo, tone_map

MAGIC = b"HP10"
BOX_META = b"META"
BOX_UTBL = b"UTBL"
BOX_EXTC = b"EXTC"
_KNOWN_BOXES = (BOX_META, BOX_UTBL, BOX_EXTC)

CHUNK_HEADER_LEN = 13                 # magic + box + component + seq_no + seq_total
CHUNK_CAPACITY = 65535 - 2 - CHUNK_HEADER_LEN  # 65520 payload bytes per segment

# fixed offset mapping signed residuals onto codec indices in no-packing mode
RESIDUAL_BIAS = 1 << 17

FORMAT_VERSION = 1

_META_STRUCT = struct.Struct(">BBIIBBddB4s4s4s")
_TMO_CODES = {TmoKind.REINHARD_GLOBAL: 0, TmoKind.BIT_SHIFT: 1}
_TMO_KINDS = {v: k for k, v in _TMO_CODES.items()}


@dataclass(frozen=True)
class ExtPayload:
    """One typed extension payload; META uses component_index 0."""

    box_type: bytes
    component_index: int
    data: bytes


@dataclass(frozen=True)
class Metadata:
    """Everything a decoder needs besides the payload bytes themselves."""

    pixel_type: PixelType
    width: int
    height: int
    q: int
    tmo: TmoParams
    packing: bool
    rct: bool
    codec_ids: tuple[str, str, str]
    version: int = FORMAT_VERSION

    def to_bytes(self) -> bytes:
        depth = 0 if self.pixel_type.is_half else self.pixel_type.bit_depth
        flags = (1 if self.packing else 0) | (2 if self.rct else 0)
        return _META_STRUCT.pack(
            self.version, depth, self.width, self.height, self.q,
            _TMO_CODES[self.tmo.kind], self.tmo.exposure_scale, self.tmo.gamma,
            flags, *(cid.encode("ascii") for cid in self.codec_ids),
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "Metadata":
        if len(data) != _META_STRUCT.size:
            raise CorruptSegment(f"metadata is {len(data)} bytes, expected {_META_STRUCT.size}")
        (version, depth, width, height, q, tmo_code, exposure, gamma,
         flags, c0, c1, c2) = _META_STRUCT.unpack(data)
        if version != FORMAT_VERSION:
            raise CorruptSegment(f"unsupported format version {version}")
        if depth == 0:
            pixel_type = HALF_FLOAT
        elif 8 <= depth <= 16:
            pixel_type = PixelType.uint(depth)
        else:
            raise CorruptSegment(f"bad pixel type byte {depth}")
        if tmo_code not in _TMO_KINDS:
            raise CorruptSegment(f"bad TMO kind {tmo_code}")
        if width == 0 or height == 0 or not 1 <= q <= 100:
            raise CorruptSegment("bad metadata fields")
        try:
            tmo = TmoParams(_TMO_KINDS[tmo_code], exposure, gamma)
            codec_ids = tuple(c.decode("ascii") for c in (c0, c1, c2))
        except (ValueError, UnicodeDecodeError) as e:
            raise CorruptSegment(f"bad metadata fields: {e}") from None
        return cls(pixel_type, width, height, q, tmo,
                   bool(flags & 1), bool(flags & 2), codec_ids, version)


def canonical_payload_order(payloads) -> list[ExtPayload]:
    rank = {BOX_META: 0, BOX_UTBL: 1, BOX_EXTC: 2}
    return sorted(payloads, key=lambda p: (p.component_index if p.box_type != BOX_META else -1,
                                           rank.get(p.box_type, 9)))


def _validate_payload_set(payloads) -> None:
    metas = [p for p in payloads if p.box_type == BOX_META]
    if len(metas) != 1:
        raise PayloadSetIncomplete(f"need exactly one META payload, found {len(metas)}")
    extc = sorted(p.component_index for p in payloads if p.box_type == BOX_EXTC)
    if extc != [0, 1, 2]:
        raise PayloadSetIncomplete(f"EXTC components {extc}, expected [0, 1, 2]")
    utbl = sorted(p.component_index for p in payloads if p.box_type == BOX_UTBL)
    if utbl not in ([], [0, 1, 2]):
        raise PayloadSetIncomplete(f"UTBL components {utbl}, expected none or all")
    for p in payloads:
        if p.box_type not in _KNOWN_BOXES:
            raise PayloadSetIncomplete(f"unknown box type {p.box_type!r}")
        if not 0 <= p.component_index <= 2:
            raise PayloadSetIncomplete(f"bad component index {p.component_index}")


def _app0_end(base: bytes) -> int:
    """Offset just past the APP0 segment (or past SOI when absent)."""
    if len(base) < 4 or base[:2] != b"\xff\xd8":
        raise InvalidBaseStream("missing SOI")
    if base[-2:] != b"\xff\xd9":
        raise InvalidBaseStream("missing EOI")
    if base[2] == 0xFF and base[3] == 0xE0:
        if len(base) < 6:
            raise InvalidBaseStream("truncated APP0")
        seg_len = struct.unpack(">H", base[4:6])[0]
        end = 4 + seg_len
        if end > len(base):
            raise InvalidBaseStream("APP0 length out of bounds")
        return end
    return 2


def mux(base_jpeg: bytes, payloads) -> bytes:
    """Insert the payload set as APP11 segments right after APP0."""
    _validate_payload_set(payloads)
    insert_at = _app0_end(base_jpeg)

    segments = bytearray()
    for p in canonical_payload_order(payloads):
        data = p.data
        nchunks = max(1, -(-len(data) // CHUNK_CAPACITY))
        if nchunks > 0xFFFF:
            raise PayloadSetIncomplete(f"payload {p.box_type!r} too large to chunk")
        for seq in range(nchunks):
            chunk = data[seq * CHUNK_CAPACITY : (seq + 1) * CHUNK_CAPACITY]
            body = (MAGIC + p.box_type + bytes([p.component_index])
                    + struct.pack(">HH", seq, nchunks) + chunk)
            segments += b"\xff\xeb" + struct.pack(">H", len(body) + 2) + body

    return base_jpeg[:insert_at] + bytes(segments) + base_jpeg[insert_at:]


_STANDALONE = {0xD8, 0xD9, 0x01} | set(range(0xD0, 0xD8))


def demux(file: bytes):
    """Split a file into (base_jpeg, payloads, metadata).

    A plain JPEG comes back unchanged with an empty payload list; foreign
    APP11 segments (magic other than HP10) stay in the base stream.
    """
    if len(file) < 4 or file[:2] != b"\xff\xd8":
        raise InvalidBaseStream("missing SOI")

    out = bytearray(b"\xff\xd8")
    chunks: dict[tuple[bytes, int], dict[int, bytes]] = {}
    totals: dict[tuple[bytes, int], int] = {}
    order: list[tuple[bytes, int]] = []
    pos = 2
    n = len(file)

    while pos < n:
        if file[pos] != 0xFF:
            raise CorruptSegment(f"expected marker at offset {pos}")
        if pos + 1 >= n:
            raise CorruptSegment("truncated marker")
        marker = file[pos + 1]
        if marker == 0xFF:  # fill byte
            out.append(0xFF)
            pos += 1
            continue
        if marker == 0xD9:
            out += file[pos:]
            pos = n
            break
        if marker in _STANDALONE:
            out += file[pos : pos + 2]
            pos += 2
            continue
        if pos + 4 > n:
            raise CorruptSegment("truncated segment header")
        seg_len = struct.unpack(">H", file[pos + 2 : pos + 4])[0]
        if seg_len < 2 or pos + 2 + seg_len > n:
            raise CorruptSegment(f"segment length out of bounds at offset {pos}")
        seg_end = pos + 2 + seg_len
        body = file[pos + 4 : seg_end]

        if marker == 0xEB and body[:4] == MAGIC:
            if len(body) < CHUNK_HEADER_LEN:
                raise CorruptSegment("HP10 segment shorter than chunk header")
            box = body[4:8]
            comp = body[8]
            seq, total = struct.unpack(">HH", body[9:13])
            if box not in _KNOWN_BOXES:
                raise CorruptSegment(f"unknown box type {box!r}")
            if comp > 2 or total == 0 or seq >= total:
                raise CorruptSegment(f"bad chunk header for {box!r}")
            key = (box, comp)
            if key not in chunks:
                chunks[key] = {}
                totals[key] = total
                order.append(key)
            elif totals[key] != total:
                raise CorruptSegment(f"inconsistent seq_total for {box!r}")
            if seq in chunks[key]:
                raise DuplicateChunk(f"chunk {seq} of {box!r} component {comp} repeated")
            chunks[key][seq] = body[13:]
        else:
            out += file[pos:seg_end]

        pos = seg_end
        if marker == 0xDA:  # entropy-coded data follows until the next marker
            scan_start = pos
            while True:
                if pos + 1 >= n:
                    raise CorruptSegment("entropy data runs past end of file")
                if file[pos] == 0xFF and file[pos + 1] != 0x00 \
                        and not 0xD0 <= file[pos + 1] <= 0xD7:
                    break
                pos += 1
            out += file[scan_start:pos]

    payloads = []
    metadata = None
    for key in order:
        box, comp = key
        total = totals[key]
        parts = []
        for seq in range(total):
            if seq not in chunks[key]:
                raise MissingChunk(box, seq)
            parts.append(chunks[key][seq])
        data = b"".join(parts)
        payloads.append(ExtPayload(box, comp, data))
        if box == BOX_META:
            metadata = Metadata.from_bytes(data)

    return bytes(out), payloads, metadata


@dataclass(frozen=True)
class EncodeStats:
    """Per-encode size and sparseness breakdown (drives reports)."""

    file_bytes: int
    base_bytes: int
    ext_bytes: tuple[int, int, int]
    table_bytes: tuple[int, int, int]
    alphas: tuple[Sparseness, Sparseness, Sparseness]


def encode_file_with_stats(hdr: HdrImage, q=50, tmo: TmoParams | None = None,
                           codec: str = MEDRICE_ID, pack: bool = True):
    """Full encode pipeline; returns (file bytes, EncodeStats)."""
    if tmo is None:
        tmo = default_tmo(hdr.pixel_type)
    qf = QualityFactor(q) if not isinstance(q, QualityFactor) else q

    ldr = tone_map(hdr, tmo)
    base = jpeg_encode(ldr, qf)
    decoded = jpeg_decode(base)
    lut = build_inverse_lut(tmo, hdr.pixel_type)
    pred = predict(lut, decoded)
    res = compute_residual(hdr, pred)
    yuv = rct_forward(*res)

    payloads = []
    ext_bytes = []
    table_bytes = []
    alphas = []
    for c, plane in enumerate(yuv):
        hist = build_histogram(plane)
        alphas.append(sparseness(hist))
        if pack:
            table = build_packing(hist)
            index_plane = pack_plane(plane, table)
            tbl_data = serialize_table(table)
            payloads.append(ExtPayload(BOX_UTBL, c, tbl_data))
            table_bytes.append(len(tbl_data))
        else:
            if plane.min() < -RESIDUAL_BIAS or plane.max() >= RESIDUAL_BIAS:
                raise RangeViolation(f"component {c}: residual exceeds bias range")
            index_plane = plane + RESIDUAL_BIAS
            table_bytes.append(0)
        cp = encode_plane(index_plane, codec)
        data = cp.to_bytes()
        payloads.append(ExtPayload(BOX_EXTC, c, data))
        ext_bytes.append(len(data))

    meta = Metadata(
        pixel_type=hdr.pixel_type, width=hdr.width, height=hdr.height,
        q=qf.q, tmo=tmo, packing=pack, rct=True,
        codec_ids=(codec, codec, codec),
    )
    payloads.append(ExtPayload(BOX_META, 0, meta.to_bytes()))
    blob = mux(base, payloads)
    stats = EncodeStats(
        file_bytes=len(blob), base_bytes=len(base),
        ext_bytes=tuple(ext_bytes), table_bytes=tuple(table_bytes),
        alphas=tuple(alphas),
    )
    return blob, stats


def encode_file(hdr: HdrImage, q=50, tmo: TmoParams | None = None,
                codec: str = MEDRICE_ID, pack: bool = True) -> bytes:
    return encode_file_with_stats(hdr, q, tmo, codec, pack)[0]


def decode_file(file: bytes) -> HdrImage:
    """Bit-exact inverse of encode_file."""
    base, payloads, meta = demux(file)
    if not payloads:
        raise LegacyOnlyFile("no extension payloads: plain JPEG")
    if meta is None:
        raise CorruptSegment("extension payloads present but no META")

    by_key = {(p.box_type, p.component_index): p.data for p in payloads}
    ldr = jpeg_decode(base)
    if (ldr.width, ldr.height) != (meta.width, meta.height):
        raise CorruptSegment("metadata dimensions disagree with base layer")

    lut = build_inverse_lut(meta.tmo, meta.pixel_type)
    pred = predict(lut, ldr)

    planes = []
    for c in range(3):
        key = (BOX_EXTC, c)
        if key not in by_key:
            raise CorruptSegment(f"missing EXTC payload for component {c}")
        cp = CodedPlane.from_bytes(by_key[key])
        if (cp.width, cp.height) != (meta.width, meta.height):
            raise CorruptSegment(f"component {c}: coded plane dimensions disagree")
        index_plane = decode_plane(cp)
        if meta.packing:
            tkey = (BOX_UTBL, c)
            if tkey not in by_key:
                raise CorruptSegment(f"missing UTBL payload for component {c}")
            try:
                table = deserialize_table(by_key[tkey])
            except CorruptTable as e:
                raise CorruptTable(f"component {c}: {e.reason}") from None
            planes.append(unpack_plane(index_plane, table))
        else:
            planes.append(index_plane - RESIDUAL_BIAS)

    res = rct_inverse(*planes) if meta.rct else tuple(planes)
    return reconstruct(pred, res, meta.pixel_type)

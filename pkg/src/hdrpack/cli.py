"""Command-line interface and benchmark harness.

Exit codes: 0 success, 1 verification mismatch, 2 format error, 3 internal
error. All output files are byte-deterministic; wall-clock time appears
only as a CSV column, never inside encoded files.
"""
from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .container import (
    BOX_EXTC,
    BOX_UTBL,
    RESIDUAL_BIAS,
    decode_file,
    demux,
    encode_file_with_stats,
)
from .errors import FormatError, HdrpackError, MalformedHeader
from .extcodec import MEDRICE_ID, RAW_ID, CodedPlane, decode_plane
from .fileio import read_pfm, read_ppm16, write_pfm, write_ppm16
from .histpack import Sparseness, build_histogram, sparseness
from .model import HdrImage
from .tmo import TmoKind, TmoParams

CODEC_NAMES = {"medrice": MEDRICE_ID, "raw": RAW_ID}
VERIFY_DEFAULT_Q = (1, 10, 50, 80, 100)
BENCH_Q_SWEEP = tuple(range(10, 101, 10))

CSV_COLUMNS = [
    "image", "width", "height", "pixel_type", "q", "packing", "codec",
    "total_bytes", "total_bits", "bpp", "base_bytes",
    "ext_bytes_0", "ext_bytes_1", "ext_bytes_2",
    "table_bytes_0", "table_bytes_1", "table_bytes_2",
    "alpha_0", "alpha_1", "alpha_2", "wall_time_s",
]


@dataclass(frozen=True)
class RunReport:
    """One benchmark row; bpp is total bits over pixel count."""

    image: str
    width: int
    height: int
    pixel_type: str
    q: int
    packing: bool
    codec: str
    total_bytes: int
    base_bytes: int
    ext_bytes: tuple[int, int, int]
    table_bytes: tuple[int, int, int]
    alphas: tuple[float, float, float]
    wall_time_s: float

    @property
    def total_bits(self) -> int:
        return self.total_bytes * 8

    @property
    def bpp(self) -> float:
        return self.total_bits / (self.width * self.height)

    @property
    def table_overhead(self) -> float:
        return sum(self.table_bytes) / self.total_bytes

    def csv_row(self) -> list:
        return [
            self.image, self.width, self.height, self.pixel_type, self.q,
            int(self.packing), self.codec, self.total_bytes, self.total_bits,
            f"{self.bpp:.6f}", self.base_bytes,
            *self.ext_bytes, *self.table_bytes,
            *(f"{a:.9f}" for a in self.alphas), f"{self.wall_time_s:.4f}",
        ]


def _pixel_type_name(img: HdrImage) -> str:
    return "half" if img.pixel_type.is_half else f"uint{img.pixel_type.bit_depth}"


def read_image(path) -> HdrImage:
    suffix = Path(path).suffix.lower()
    if suffix == ".pfm":
        return read_pfm(path)
    if suffix in (".ppm", ".pnm"):
        return read_ppm16(path)
    raise MalformedHeader(f"cannot infer input format from {path!r} (use .pfm or .ppm)")


def write_image(img: HdrImage, path) -> None:
    if img.pixel_type.is_half:
        write_pfm(img, path)
    else:
        write_ppm16(img, path)


def _tmo_from_args(args) -> TmoParams | None:
    if args.tmo is None:
        return None
    return TmoParams(TmoKind(args.tmo))


def _images_equal(a: HdrImage, b: HdrImage) -> bool:
    return (
        a.width == b.width and a.height == b.height
        and a.pixel_type == b.pixel_type
        and all(np.array_equal(a.planes[c], b.planes[c]) for c in range(3))
    )


def cmd_encode(args) -> int:
    img = read_image(args.input)
    blob, _ = encode_file_with_stats(
        img, q=args.q, tmo=_tmo_from_args(args),
        codec=CODEC_NAMES[args.codec], pack=not args.no_pack,
    )
    Path(args.output).write_bytes(blob)
    print(f"encoded {args.input} -> {args.output} ({len(blob)} bytes, q={args.q})")
    return 0


def cmd_decode(args) -> int:
    img = decode_file(Path(args.input).read_bytes())
    write_image(img, args.output)
    print(f"decoded {args.input} -> {args.output} "
          f"({img.width}x{img.height} {_pixel_type_name(img)})")
    return 0


def cmd_verify(args) -> int:
    img = read_image(args.input)
    qs = args.q if args.q else list(VERIFY_DEFAULT_Q)
    failures = 0
    for q in qs:
        blob, _ = encode_file_with_stats(
            img, q=q, tmo=_tmo_from_args(args),
            codec=CODEC_NAMES[args.codec], pack=not args.no_pack,
        )
        ok = _images_equal(img, decode_file(blob))
        print(f"verify {args.input} q={q}: {'OK' if ok else 'MISMATCH'}")
        if not ok:
            failures += 1
    return 1 if failures else 0


def _alphas_from_file(payloads, meta) -> list[Sparseness]:
    """Sparseness of the residual planes, from tables when present."""
    by_key = {(p.box_type, p.component_index): p.data for p in payloads}
    out = []
    for c in range(3):
        if meta.packing:
            from .histpack import deserialize_table

            table = deserialize_table(by_key[(BOX_UTBL, c)])
            span = int(table.values[-1]) - int(table.values[0]) + 1
            out.append(Sparseness(used_bins=len(table), span=span))
        else:
            plane = decode_plane(CodedPlane.from_bytes(by_key[(BOX_EXTC, c)]))
            out.append(sparseness(build_histogram(plane - RESIDUAL_BIAS)))
    return out


def cmd_info(args) -> int:
    blob = Path(args.input).read_bytes()
    base, payloads, meta = demux(blob)
    if meta is None:
        print(f"{args.input}: legacy baseline JPEG, no extension layer "
              f"({len(blob)} bytes)")
        return 0
    by_key = {(p.box_type, p.component_index): p.data for p in payloads}
    ext_bytes = [len(by_key.get((BOX_EXTC, c), b"")) for c in range(3)]
    table_bytes = [len(by_key.get((BOX_UTBL, c), b"")) for c in range(3)]
    alphas = _alphas_from_file(payloads, meta)
    total = len(blob)
    pixels = meta.width * meta.height

    print(f"file:            {args.input} ({total} bytes, {total * 8 / pixels:.3f} bpp)")
    print(f"image:           {meta.width}x{meta.height} "
          f"{'half' if meta.pixel_type.is_half else f'uint{meta.pixel_type.bit_depth}'}")
    print(f"base layer:      q={meta.q}, {len(base)} bytes, tmo={meta.tmo.kind.value}")
    print(f"packing:         {'on' if meta.packing else 'off'}; "
          f"codecs={','.join(meta.codec_ids)}")
    for c in range(3):
        a = alphas[c]
        print(f"component {c}:     ext={ext_bytes[c]}B table={table_bytes[c]}B "
              f"alpha={a.alpha:.6f} emptiness={a.emptiness:.6f}")
    print(f"table overhead:  {sum(table_bytes)} / {total} bytes "
          f"= {sum(table_bytes) / total:.6%}")
    return 0


def bench_one(path, img: HdrImage, q: int, pack: bool, codec_name: str) -> RunReport:
    t0 = time.perf_counter()
    blob, stats = encode_file_with_stats(
        img, q=q, codec=CODEC_NAMES[codec_name], pack=pack
    )
    wall = time.perf_counter() - t0
    return RunReport(
        image=Path(path).name, width=img.width, height=img.height,
        pixel_type=_pixel_type_name(img), q=q, packing=pack, codec=codec_name,
        total_bytes=len(blob), base_bytes=stats.base_bytes,
        ext_bytes=stats.ext_bytes, table_bytes=stats.table_bytes,
        alphas=tuple(a.alpha for a in stats.alphas), wall_time_s=wall,
    )


def cmd_bench(args) -> int:
    paths = sorted(
        p for p in Path(args.dir).iterdir()
        if p.suffix.lower() in (".pfm", ".ppm", ".pnm")
    )
    if not paths:
        raise MalformedHeader(f"no .pfm/.ppm images found in {args.dir}")
    with open(args.out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for path in paths:
            img = read_image(path)
            for q in BENCH_Q_SWEEP:
                for pack in (True, False):
                    for codec_name in ("medrice", "raw"):
                        report = bench_one(path, img, q, pack, codec_name)
                        writer.writerow(report.csv_row())
    rows = len(paths) * len(BENCH_Q_SWEEP) * 2 * 2
    print(f"bench: {len(paths)} images -> {rows} rows in {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdrpack",
        description="Two-layer lossless HDR codec with a legacy-compatible JPEG base layer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_coding_flags(p, with_q=True):
        if with_q:
            p.add_argument("--q", type=int, default=50, help="base-layer quality 1..100")
        p.add_argument("--tmo", choices=[k.value for k in TmoKind], default=None,
                       help="tone mapping operator (default: by pixel type)")
        p.add_argument("--codec", choices=sorted(CODEC_NAMES), default="medrice",
                       help="extension-layer plane codec")
        p.add_argument("--no-pack", action="store_true",
                       help="code residual planes directly, without histogram packing")

    p = sub.add_parser("encode", help="encode PFM/PPM to a two-layer file")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    add_coding_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a two-layer file back to PFM/PPM")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("verify", help="encode, decode, and compare bit-exactly")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--q", type=int, action="append", default=None,
                   help=f"quality values to test (default {list(VERIFY_DEFAULT_Q)})")
    add_coding_flags(p, with_q=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("info", help="show layer sizes and sparseness of a file")
    p.add_argument("-i", "--input", required=True)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("bench", help="sweep q x packing x codec over a directory")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as e:
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 2
    except HdrpackError as e:
        print(f"error [{type(e).__name__}]: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error [io]: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

import csv

import numpy as np
import pytest

from hdrpack import PixelType, decode_file, read_pfm, read_ppm16, write_pfm, write_ppm16
from hdrpack.cli import CSV_COLUMNS, main

from .conftest import (
    constant_image,
    images_equal,
    random_half_image,
    random_uint_image,
    sparse_spaced_image,
)


@pytest.fixture
def half_pfm(rng, tmp_path):
    path = tmp_path / "img.pfm"
    write_pfm(random_half_image(rng, 12, 10), path)
    return path


@pytest.fixture
def uint_ppm(rng, tmp_path):
    path = tmp_path / "img.ppm"
    write_ppm16(random_uint_image(rng, 12, 10, 12), path)
    return path


def test_encode_decode_roundtrip_pfm(half_pfm, tmp_path):
    out = tmp_path / "out.hpj"
    back = tmp_path / "back.pfm"
    assert main(["encode", "-i", str(half_pfm), "-o", str(out), "--q", "70"]) == 0
    assert main(["decode", "-i", str(out), "-o", str(back)]) == 0
    assert images_equal(read_pfm(half_pfm), read_pfm(back))


def test_encode_decode_roundtrip_ppm(uint_ppm, tmp_path):
    out = tmp_path / "out.hpj"
    back = tmp_path / "back.ppm"
    assert main(["encode", "-i", str(uint_ppm), "-o", str(out)]) == 0
    assert main(["decode", "-i", str(out), "-o", str(back)]) == 0
    assert images_equal(read_ppm16(uint_ppm), read_ppm16(back))


def test_encode_flags(uint_ppm, tmp_path):
    out = tmp_path / "o.hpj"
    assert main(["encode", "-i", str(uint_ppm), "-o", str(out),
                 "--codec", "raw", "--no-pack", "--q", "15"]) == 0
    img = decode_file(out.read_bytes())
    assert images_equal(read_ppm16(uint_ppm), img)


def test_verify_default_sweep(half_pfm, capsys):
    assert main(["verify", "-i", str(half_pfm)]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("verify")]
    assert len(lines) == 5  # q in {1, 10, 50, 80, 100}
    assert all(l.endswith("OK") for l in lines)


def test_verify_explicit_q(uint_ppm):
    assert main(["verify", "-i", str(uint_ppm), "--q", "25", "--q", "75"]) == 0


def test_verify_mismatch_exit_code(half_pfm, monkeypatch, rng):
    import hdrpack.cli as cli_mod

    wrong = random_half_image(rng, 12, 10)
    monkeypatch.setattr(cli_mod, "decode_file", lambda blob: wrong)
    assert main(["verify", "-i", str(half_pfm), "--q", "50"]) == 1


def test_info_constant_image(tmp_path, capsys):
    path = tmp_path / "c.ppm"
    write_ppm16(constant_image(1234, 9, 9, PixelType.uint(12)), path)
    out = tmp_path / "c.hpj"
    assert main(["encode", "-i", str(path), "-o", str(out)]) == 0
    capsys.readouterr()
    assert main(["info", "-i", str(out)]) == 0
    text = capsys.readouterr().out
    assert text.count("alpha=1.000000") == 3  # constant residual planes
    assert "emptiness=0.000000" in text
    assert "table overhead" in text


def test_info_legacy_jpeg(tmp_path, rng, capsys):
    from hdrpack import jpeg_encode
    from hdrpack.tmo import LdrImage

    planes = tuple(rng.integers(0, 256, (8, 8)).astype(np.uint8) for _ in range(3))
    path = tmp_path / "plain.jpg"
    path.write_bytes(jpeg_encode(LdrImage(8, 8, planes), 50))
    assert main(["info", "-i", str(path)]) == 0
    assert "legacy" in capsys.readouterr().out


def test_decode_garbage_is_format_error(tmp_path):
    bad = tmp_path / "bad.hpj"
    bad.write_bytes(b"this is not a container")
    assert main(["decode", "-i", str(bad), "-o", str(tmp_path / "x.pfm")]) == 2


def test_decode_legacy_jpeg_is_format_error(tmp_path, rng):
    from hdrpack import jpeg_encode
    from hdrpack.tmo import LdrImage

    planes = tuple(rng.integers(0, 256, (8, 8)).astype(np.uint8) for _ in range(3))
    path = tmp_path / "plain.jpg"
    path.write_bytes(jpeg_encode(LdrImage(8, 8, planes), 50))
    assert main(["decode", "-i", str(path), "-o", str(tmp_path / "x.pfm")]) == 2


def test_bench_csv(tmp_path, rng, capsys):
    bench_dir = tmp_path / "imgs"
    bench_dir.mkdir()
    write_pfm(random_half_image(rng, 8, 6), bench_dir / "a.pfm")
    write_ppm16(sparse_spaced_image(rng, 8, 6, pixel_type=PixelType.uint(16)),
                bench_dir / "b.ppm")
    out_csv = tmp_path / "report.csv"
    assert main(["bench", "--dir", str(bench_dir), "--out", str(out_csv)]) == 0

    with open(out_csv, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == CSV_COLUMNS
    # images x 10 q values x 2 packing modes x 2 codecs
    assert len(rows) - 1 == 2 * 10 * 2 * 2

    # determinism: identical invocation, identical CSV apart from wall time
    out2 = tmp_path / "report2.csv"
    assert main(["bench", "--dir", str(bench_dir), "--out", str(out2)]) == 0
    with open(out2, newline="") as f:
        rows2 = list(csv.reader(f))
    wall = CSV_COLUMNS.index("wall_time_s")
    for r1, r2 in zip(rows, rows2):
        assert r1[:wall] == r2[:wall]


def test_cli_file_deterministic(half_pfm, tmp_path):
    a = tmp_path / "a.hpj"
    b = tmp_path / "b.hpj"
    assert main(["encode", "-i", str(half_pfm), "-o", str(a)]) == 0
    assert main(["encode", "-i", str(half_pfm), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()

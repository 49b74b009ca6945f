import struct

import numpy as np
import pytest

from hdrpack import HALF_FLOAT, PixelType, make_image, read_pfm, read_ppm16, write_pfm, write_ppm16
from hdrpack.errors import MalformedHeader, MaxvalUnsupported, UnsupportedPfm, WrongPixelType
from hdrpack.model import float32_to_half_codes

from .conftest import images_equal, random_half_image, random_uint_image
from .helpers import float_bits_of, float_to_half_bits


class TestPfm:
    def test_one_pixel_ones(self, tmp_path):
        p = tmp_path / "one.pfm"
        p.write_bytes(b"PF\n1 1\n-1.0\n" + struct.pack("<3f", 1.0, 1.0, 1.0))
        img = read_pfm(p)
        assert img.pixel_type == HALF_FLOAT
        assert [int(pl[0, 0]) for pl in img.planes] == [0x3C00] * 3

    def test_grayscale_rejected(self, tmp_path):
        p = tmp_path / "gray.pfm"
        p.write_bytes(b"Pf\n1 1\n-1.0\n" + struct.pack("<f", 1.0))
        with pytest.raises(UnsupportedPfm):
            read_pfm(p)

    def test_nearest_even_narrowing(self, tmp_path):
        # 1.0000001f is closer to half 1.0 than to the next half up
        p = tmp_path / "near.pfm"
        p.write_bytes(b"PF\n1 1\n-1.0\n" + struct.pack("<3f", 1.0000001, 1.0000001, 1.0000001))
        img = read_pfm(p)
        assert int(img.planes[0][0, 0]) == 0x3C00

    def test_narrowing_matches_reference_oracle(self, rng):
        # vectorized cast versus the scalar reference converter
        f32 = rng.random(512, dtype=np.float32) * rng.choice([1e-8, 1.0, 1e4, 7e4], 512)
        f32 = f32 * rng.choice([-1.0, 1.0], 512).astype(np.float32)
        ours = float32_to_half_codes(f32)
        for i in range(len(f32)):
            assert int(ours[i]) == float_to_half_bits(float_bits_of(float(f32[i]))), f32[i]

    def test_roundtrip_preserves_codes(self, rng, tmp_path):
        img = random_half_image(rng, 9, 6)  # random patterns incl NaN/Inf
        path = tmp_path / "rt.pfm"
        write_pfm(img, path)
        assert images_equal(read_pfm(path), img)

    def test_nan_payload_survives(self, tmp_path):
        img = make_image(2, 1, [[0x7E00, 0xFC00], [0x7C01, 0x0001], [0xFFFF, 0x8000]],
                         HALF_FLOAT)
        path = tmp_path / "nan.pfm"
        write_pfm(img, path)
        assert images_equal(read_pfm(path), img)

    def test_big_endian_scale(self, tmp_path):
        p = tmp_path / "be.pfm"
        p.write_bytes(b"PF\n1 1\n1.0\n" + struct.pack(">3f", 0.5, 0.25, 2.0))
        img = read_pfm(p)
        assert [int(pl[0, 0]) for pl in img.planes] == [0x3800, 0x3400, 0x4000]

    def test_row_order_bottom_up(self, tmp_path):
        # PFM stores the bottom row first; reader must flip to top-down
        p = tmp_path / "rows.pfm"
        bottom = struct.pack("<3f", 1.0, 1.0, 1.0)
        top = struct.pack("<3f", 2.0, 2.0, 2.0)
        p.write_bytes(b"PF\n1 2\n-1.0\n" + bottom + top)
        img = read_pfm(p)
        assert int(img.planes[0][0, 0]) == 0x4000  # top row = 2.0
        assert int(img.planes[0][1, 0]) == 0x3C00

    def test_wrong_pixel_type(self, rng, tmp_path):
        img = random_uint_image(rng, 2, 2, 12)
        with pytest.raises(WrongPixelType):
            write_pfm(img, tmp_path / "x.pfm")

    def test_truncated_data(self, tmp_path):
        p = tmp_path / "short.pfm"
        p.write_bytes(b"PF\n2 2\n-1.0\n" + b"\x00" * 10)
        with pytest.raises(MalformedHeader):
            read_pfm(p)

    def test_garbage_header(self, tmp_path):
        p = tmp_path / "bad.pfm"
        p.write_bytes(b"PF\nx y\n-1.0\n")
        with pytest.raises(MalformedHeader):
            read_pfm(p)


class TestPpm16:
    def test_maxval_4095_is_uint12(self, tmp_path):
        p = tmp_path / "a.ppm"
        p.write_bytes(b"P6\n2 1\n4095\n" + struct.pack(">6H", 0, 1, 2, 4095, 100, 7))
        img = read_ppm16(p)
        assert img.pixel_type == PixelType.uint(12)
        assert int(img.planes[0][0, 1]) == 4095

    def test_maxval_65535_is_uint16(self, tmp_path):
        p = tmp_path / "b.ppm"
        p.write_bytes(b"P6\n1 1\n65535\n" + struct.pack(">3H", 65535, 0, 9))
        assert read_ppm16(p).pixel_type == PixelType.uint(16)

    def test_roundtrip(self, rng, tmp_path):
        for depth in (12, 16):
            img = random_uint_image(rng, 7, 5, depth)
            path = tmp_path / f"rt{depth}.ppm"
            write_ppm16(img, path)
            assert images_equal(read_ppm16(path), img)

    def test_maxval_too_large(self, tmp_path):
        p = tmp_path / "big.ppm"
        p.write_bytes(b"P6\n1 1\n100000\n" + b"\x00" * 6)
        with pytest.raises(MalformedHeader):
            read_ppm16(p)

    def test_eight_bit_routed_away(self, tmp_path):
        p = tmp_path / "small.ppm"
        p.write_bytes(b"P6\n1 1\n255\n" + b"\x00" * 3)
        with pytest.raises(MaxvalUnsupported):
            read_ppm16(p)

    def test_comments_in_header(self, tmp_path):
        p = tmp_path / "c.ppm"
        p.write_bytes(b"P6 # created by a test\n2 1 # dims\n4095\n"
                      + struct.pack(">6H", 1, 2, 3, 4, 5, 6))
        img = read_ppm16(p)
        assert img.width == 2 and img.height == 1

    def test_sample_above_maxval_rejected(self, tmp_path):
        p = tmp_path / "over.ppm"
        p.write_bytes(b"P6\n1 1\n300\n" + struct.pack(">3H", 301, 0, 0))
        with pytest.raises(MalformedHeader):
            read_ppm16(p)

    def test_wrong_pixel_type(self, rng, tmp_path):
        img = random_half_image(rng, 2, 2)
        with pytest.raises(WrongPixelType):
            write_ppm16(img, tmp_path / "x.ppm")

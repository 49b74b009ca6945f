import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hdrpack import (
    HALF_FLOAT,
    PixelType,
    TmoKind,
    TmoParams,
    build_inverse_lut,
    compute_residual,
    make_image,
    predict,
    rct_forward,
    rct_inverse,
    reconstruct,
)
from hdrpack.errors import DimensionMismatch, RangeViolation, UnsupportedKind
from hdrpack.tmo import LdrImage

from .conftest import random_half_image, random_uint_image


class TestInverseLut:
    def test_bitshift_midpoints_d12(self):
        lut = build_inverse_lut(TmoParams(TmoKind.BIT_SHIFT), PixelType.uint(12))
        assert lut.tables[0][0] == 8      # 0*16 + 8
        assert lut.tables[0][255] == 4088  # 255*16 + 8
        assert lut.tables[0][100] == 1608

    def test_bitshift_d8_is_identity(self):
        lut = build_inverse_lut(TmoParams(TmoKind.BIT_SHIFT), PixelType.uint(8))
        assert np.array_equal(lut.tables[0], np.arange(256))

    def test_reinhard_lut_nondecreasing(self):
        # scan of the inverse at every bin center: codes of positive halves
        # sort like their values, so the table must be monotone
        lut = build_inverse_lut(TmoParams(TmoKind.REINHARD_GLOBAL), HALF_FLOAT)
        vals = lut.tables[0].astype(np.int64)
        assert (np.diff(vals) >= 0).all()

    def test_kind_mismatch(self):
        with pytest.raises(UnsupportedKind):
            build_inverse_lut(TmoParams(TmoKind.BIT_SHIFT), HALF_FLOAT)
        with pytest.raises(UnsupportedKind):
            build_inverse_lut(TmoParams(TmoKind.REINHARD_GLOBAL), PixelType.uint(12))

    def test_deterministic(self):
        p = TmoParams(TmoKind.REINHARD_GLOBAL, exposure_scale=2.0)
        a = build_inverse_lut(p, HALF_FLOAT)
        b = build_inverse_lut(p, HALF_FLOAT)
        assert all(np.array_equal(a.tables[c], b.tables[c]) for c in range(3))


class TestResidual:
    def test_zero_when_prediction_exact(self, rng):
        img = random_uint_image(rng, 6, 4, 12)
        res = compute_residual(img, img.planes)
        assert all((r == 0).all() for r in res)

    def test_extreme_bounds(self):
        orig = make_image(1, 1, [[65535], [0], [1]], HALF_FLOAT)
        pred = (np.zeros((1, 1), np.uint16), np.full((1, 1), 65535, np.uint16),
                np.ones((1, 1), np.uint16))
        res = compute_residual(orig, pred)
        assert res[0][0, 0] == 65535
        assert res[1][0, 0] == -65535
        assert res[2][0, 0] == 0

    def test_matches_naive_loop(self, rng):
        img = random_uint_image(rng, 9, 5, 12)
        pred = tuple(rng.integers(0, 4096, (5, 9)).astype(np.uint16) for _ in range(3))
        res = compute_residual(img, pred)
        for c in range(3):
            for (y, x), v in np.ndenumerate(img.planes[c]):
                assert res[c][y, x] == int(v) - int(pred[c][y, x])

    def test_dimension_mismatch(self, rng):
        img = random_uint_image(rng, 4, 4, 12)
        pred = tuple(np.zeros((4, 5), np.uint16) for _ in range(3))
        with pytest.raises(DimensionMismatch):
            compute_residual(img, pred)

    def test_reconstruct_zero_residual_is_prediction(self, rng):
        pred = tuple(rng.integers(0, 4096, (3, 4)).astype(np.uint16) for _ in range(3))
        res = tuple(np.zeros((3, 4), np.int64) for _ in range(3))
        out = reconstruct(pred, res, PixelType.uint(12))
        assert all(np.array_equal(out.planes[c], pred[c]) for c in range(3))

    def test_bitshift_lut_reconstructs_top_bits(self):
        # the BitShift forward map followed by the inverse lookup restores
        # the top 8 bits of every code exactly
        for d in (8, 9, 12, 16):
            lut = build_inverse_lut(TmoParams(TmoKind.BIT_SHIFT), PixelType.uint(d))
            v = np.arange(256)
            assert np.array_equal(lut.tables[0][v].astype(np.int64) >> (d - 8), v)

    def test_reconstruct_roundtrip(self, rng):
        img = random_half_image(rng, 11, 7)
        pred = tuple(rng.integers(0, 65536, (7, 11)).astype(np.uint16) for _ in range(3))
        res = compute_residual(img, pred)
        out = reconstruct(pred, res, HALF_FLOAT)
        assert all(np.array_equal(out.planes[c], img.planes[c]) for c in range(3))

    def test_reconstruct_range_violation(self):
        pred = tuple(np.full((1, 1), 65535, np.uint16) for _ in range(3))
        res = tuple(np.ones((1, 1), np.int64) for _ in range(3))
        with pytest.raises(RangeViolation):
            reconstruct(pred, res, HALF_FLOAT)

    def test_prediction_pipeline(self, rng):
        img = random_uint_image(rng, 8, 8, 12)
        lut = build_inverse_lut(TmoParams(TmoKind.BIT_SHIFT), PixelType.uint(12))
        ldr = LdrImage(8, 8, tuple((p >> 4).astype(np.uint8) for p in img.planes))
        pred = predict(lut, ldr)
        res = compute_residual(img, pred)
        # bitshift prediction is the bin midpoint: residual within half a bin
        assert max(abs(int(r.min())) for r in res) <= 8
        assert max(int(r.max()) for r in res) <= 8


class TestReversibleTransform:
    def test_zero(self):
        z = np.zeros((2, 2), np.int64)
        y, u, v = rct_forward(z, z, z)
        assert (y == 0).all() and (u == 0).all() and (v == 0).all()

    def test_gray_maps_to_luma_only(self):
        one = np.ones((2, 2), np.int64)
        y, u, v = rct_forward(one, one, one)
        assert (y == 1).all() and (u == 0).all() and (v == 0).all()

    def test_worked_example(self):
        r = np.array([[-3]]); g = np.array([[5]]); b = np.array([[2]])
        y, u, v = rct_forward(r, g, b)
        assert (y.item(), u.item(), v.item()) == (2, -3, -8)  # floor(9/4) = 2
        r2, g2, b2 = rct_inverse(y, u, v)
        assert (r2.item(), g2.item(), b2.item()) == (-3, 5, 2)

    def test_exhaustive_small_grid(self):
        span = np.arange(-9, 10)
        r, g, b = np.meshgrid(span, span, span, indexing="ij")
        out = rct_inverse(*rct_forward(r, g, b))
        assert np.array_equal(out[0], r)
        assert np.array_equal(out[1], g)
        assert np.array_equal(out[2], b)

    def test_sampled_grid_at_257(self):
        # sampled version of the +-257 grid from the contract
        span = np.arange(-257, 258, 8)
        r, g, b = np.meshgrid(span, span, span, indexing="ij")
        out = rct_inverse(*rct_forward(r, g, b))
        assert all(np.array_equal(out[i], x) for i, x in enumerate((r, g, b)))

    @settings(max_examples=300)
    @given(st.tuples(*[st.integers(-(1 << 17), 1 << 17)] * 3))
    def test_roundtrip_property(self, triple):
        r, g, b = (np.array([[x]], dtype=np.int64) for x in triple)
        r2, g2, b2 = rct_inverse(*rct_forward(r, g, b))
        assert (r2.item(), g2.item(), b2.item()) == triple

    def test_residual_magnitude_bound(self, rng):
        # 17-bit signed capacity is sufficient for any prediction in range
        img = random_half_image(rng, 16, 16)
        pred = tuple(rng.integers(0, 65536, (16, 16)).astype(np.uint16) for _ in range(3))
        res = compute_residual(img, pred)
        assert all(np.abs(r).max() <= 65535 for r in res)

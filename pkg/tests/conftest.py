from __future__ import annotations

import numpy as np
import pytest

from hdrpack import HALF_FLOAT, HdrImage, PixelType, make_image


def random_half_image(rng, width, height) -> HdrImage:
    """Uniform random 16-bit codes: includes NaN/Inf/subnormal patterns."""
    planes = [rng.integers(0, 65536, (height, width)) for _ in range(3)]
    return make_image(width, height, planes, HALF_FLOAT)


def random_uint_image(rng, width, height, depth) -> HdrImage:
    planes = [rng.integers(0, 1 << depth, (height, width)) for _ in range(3)]
    return make_image(width, height, planes, PixelType.uint(depth))


def natural_half_image(rng, width, height) -> HdrImage:
    """Smooth gradients plus noise, finite values only."""
    yy, xx = np.meshgrid(np.linspace(0, 1, height), np.linspace(0, 1, width), indexing="ij")
    planes = []
    for c in range(3):
        base = 0.05 + 4.0 * (xx * (c + 1) + yy * (3 - c)) / 4.0
        vals = base * np.exp(rng.normal(0, 0.08, (height, width)))
        codes = vals.astype(np.float32).astype(np.float16).view(np.uint16)
        planes.append(codes)
    return make_image(width, height, planes, HALF_FLOAT)


def sparse_spaced_image(rng, width, height, spacing=256, levels=16,
                        pixel_type=PixelType.uint(16)) -> HdrImage:
    """Distinct values spaced exactly ``spacing`` apart: adversarially sparse."""
    limit = pixel_type.code_limit
    levels = min(levels, (limit - 1) // spacing)
    offset = int(rng.integers(0, spacing // 4))
    choices = offset + np.arange(levels) * spacing
    planes = [choices[rng.integers(0, levels, (height, width))] for _ in range(3)]
    return make_image(width, height, planes, pixel_type)


def constant_image(value, width, height, pixel_type) -> HdrImage:
    planes = [np.full((height, width), value, dtype=np.int64) for _ in range(3)]
    return make_image(width, height, planes, pixel_type)


def images_equal(a: HdrImage, b: HdrImage) -> bool:
    return (
        a.width == b.width and a.height == b.height and a.pixel_type == b.pixel_type
        and all(np.array_equal(a.planes[c], b.planes[c]) for c in range(3))
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0DEC)

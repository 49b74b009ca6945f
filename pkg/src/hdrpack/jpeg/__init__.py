from .codec import (
    QualityFactor,
    jpeg_decode,
    jpeg_encode,
    quality_to_tables,
    rgb_to_ycbcr,
    ycbcr_to_rgb,
)

__all__ = [
    "QualityFactor",
    "jpeg_decode",
    "jpeg_encode",
    "quality_to_tables",
    "rgb_to_ycbcr",
    "ycbcr_to_rgb",
]

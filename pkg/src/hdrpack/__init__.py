"""Two-layer lossless HDR image codec.

The base layer is a plain baseline JPEG of a tone-mapped LDR image; the
extension layer losslessly codes histogram-packed residuals. Both are
multiplexed into a single file that any legacy JPEG decoder can open.
"""
from . import errors
from .container import (
    ExtPayload,
    Metadata,
    decode_file,
    demux,
    encode_file,
    encode_file_with_stats,
    mux,
)
from .extcodec import (
    CodedPlane,
    MEDRICE_ID,
    RAW_ID,
    decode_plane,
    encode_plane,
    encode_plane_medrice,
    encode_plane_raw,
    register_plane_codec,
)
from .fileio import read_pfm, read_ppm16, write_pfm, write_ppm16
from .histpack import (
    Histogram,
    Sparseness,
    UnpackingTable,
    build_histogram,
    build_packing,
    deserialize_table,
    pack_plane,
    serialize_table,
    sparseness,
    unpack_plane,
)
from .jpeg import QualityFactor, jpeg_decode, jpeg_encode, quality_to_tables
from .model import (
    HALF_FLOAT,
    HdrImage,
    PixelType,
    code_to_half,
    half_to_code,
    make_image,
)
from .residual import (
    InverseTmoLut,
    build_inverse_lut,
    compute_residual,
    predict,
    rct_forward,
    rct_inverse,
    reconstruct,
)
from .tmo import LdrImage, TmoKind, TmoParams, default_tmo, tone_map

__version__ = "0.1.0"

__all__ = [
    "CodedPlane", "ExtPayload", "HALF_FLOAT", "HdrImage", "Histogram",
    "InverseTmoLut", "LdrImage", "MEDRICE_ID", "Metadata", "PixelType",
    "QualityFactor", "RAW_ID", "Sparseness", "TmoKind", "TmoParams",
    "UnpackingTable", "build_histogram", "build_inverse_lut", "build_packing",
    "code_to_half", "compute_residual", "decode_file", "decode_plane",
    "default_tmo", "demux", "deserialize_table", "encode_file",
    "encode_file_with_stats", "encode_plane", "encode_plane_medrice",
    "encode_plane_raw", "errors", "half_to_code", "jpeg_decode", "jpeg_encode",
    "make_image", "mux", "pack_plane", "predict", "quality_to_tables",
    "rct_forward", "rct_inverse", "read_pfm", "read_ppm16", "reconstruct",
    "register_plane_codec", "serialize_table", "sparseness", "tone_map",
    "unpack_plane", "write_pfm", "write_ppm16",
]

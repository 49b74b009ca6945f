"""Exception hierarchy for the codec.

``FormatError`` covers everything that means "the bytes on disk are bad or
unsupported"; the CLI maps it to exit code 2. Everything else derived from
``HdrpackError`` is an API misuse or internal failure (exit code 3).
"""


class HdrpackError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(HdrpackError):
    """Input bytes are malformed, corrupt, or use an unsupported feature."""


# --- image model ---

class DimensionMismatch(HdrpackError):
    pass


class SampleOutOfRange(HdrpackError):
    def __init__(self, plane: int, index: int, value: int, limit: int):
        super().__init__(
            f"plane {plane} sample {index} = {value} exceeds limit {limit - 1}"
        )
        self.plane = plane
        self.index = index
        self.value = value


# --- tone mapping / prediction ---

class UnsupportedKind(HdrpackError):
    """Tone-mapping kind incompatible with the image's pixel type."""


class RangeViolation(HdrpackError):
    """Reconstructed sample falls outside the valid code range."""


# --- base-layer JPEG ---

class MalformedStream(FormatError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"malformed JPEG stream at offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class UnsupportedFeature(FormatError):
    """Valid JPEG, but uses a coding feature outside the baseline subset."""


# --- histogram packing ---

class EmptyPlane(HdrpackError):
    pass


class ValueNotInTable(HdrpackError):
    def __init__(self, sample: int, position: int):
        super().__init__(f"sample {sample} at position {position} not in unpacking table")
        self.sample = sample
        self.position = position


class IndexOutOfTable(HdrpackError):
    pass


class CorruptTable(FormatError):
    def __init__(self, reason: str):
        super().__init__(f"corrupt unpacking table: {reason}")
        self.reason = reason


# --- extension-layer plane codec ---

class UnknownCodec(FormatError):
    def __init__(self, codec_id):
        super().__init__(f"unknown plane codec id {codec_id!r}")
        self.codec_id = codec_id


class CorruptPayload(FormatError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"corrupt coded plane at bit offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason


class IndexOverflow(FormatError):
    """Decoded index exceeds the declared max_index."""


# --- container ---

class InvalidBaseStream(FormatError):
    pass


class PayloadSetIncomplete(HdrpackError):
    pass


class MissingChunk(FormatError):
    def __init__(self, box_type: bytes, seq_no: int):
        super().__init__(f"missing chunk {seq_no} of payload {box_type!r}")
        self.box_type = box_type
        self.seq_no = seq_no


class DuplicateChunk(FormatError):
    pass


class CorruptSegment(FormatError):
    pass


class LegacyOnlyFile(FormatError):
    """Plain JPEG without extension payloads; nothing to reconstruct."""


# --- file ingestion ---

class UnsupportedPfm(FormatError):
    def __init__(self, reason: str):
        super().__init__(f"unsupported PFM: {reason}")
        self.reason = reason


class MalformedHeader(FormatError):
    pass


class MaxvalUnsupported(FormatError):
    pass


class WrongPixelType(HdrpackError):
    pass

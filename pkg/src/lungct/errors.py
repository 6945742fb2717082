"""Exception hierarchy shared by all toolkit modules.

Every error carries a short machine-parseable code used by the CLI as the
stderr prefix and to pick the process exit status.
"""


class LungCtError(Exception):
    """Base class; `code` is the machine-readable identifier."""

    code = "E_INTERNAL"
    exit_status = 1


class IoFailure(LungCtError):
    code = "E_IO"
    exit_status = 3


class MissingHeaderKey(IoFailure):
    code = "E_MISSING_HEADER_KEY"


class UnsupportedElementType(IoFailure):
    code = "E_UNSUPPORTED_ELEMENT_TYPE"


class CompressedDataUnsupported(IoFailure):
    code = "E_COMPRESSED_DATA"


class SizeMismatch(IoFailure):
    code = "E_SIZE_MISMATCH"


class RangeOverflow(LungCtError):
    code = "E_RANGE_OVERFLOW"
    exit_status = 3


class GeometryMismatch(LungCtError):
    code = "E_GEOMETRY"
    exit_status = 3


class EmptyMask(LungCtError):
    code = "E_EMPTY_MASK"
    exit_status = 3


class SeedOutsideLung(LungCtError):
    code = "E_SEED_OUTSIDE_LUNG"
    exit_status = 3


class DegenerateHistogram(LungCtError):
    code = "E_DEGENERATE_FIT"
    exit_status = 4


class NonConcaveFit(LungCtError):
    code = "E_NONCONCAVE_FIT"
    exit_status = 4


class BothEmpty(LungCtError):
    code = "E_BOTH_EMPTY"
    exit_status = 4


class LengthMismatch(LungCtError):
    code = "E_LENGTH_MISMATCH"
    exit_status = 3


class ConstantInput(LungCtError):
    code = "E_CONSTANT_INPUT"
    exit_status = 4


class TooFewPoints(LungCtError):
    code = "E_TOO_FEW_POINTS"
    exit_status = 3


class ConfigError(LungCtError):
    code = "E_CONFIG"
    exit_status = 2

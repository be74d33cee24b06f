"""Exceptions raised by the realism-score pipeline."""


class IrsError(Exception):
    """Base class for every error raised by this package"""


# ===== Decoding and image primitives =====

class UnsupportedFormat(IrsError, ValueError):
    """The bytes are not a PNG, JPEG or BMP file"""


class CorruptFile(IrsError, ValueError):
    """The file claims a supported format but cannot be decoded"""


class ImageTooSmall(IrsError, ValueError):
    """The shorter image side is below the minimum working size"""


class InvalidSigma(IrsError, ValueError):
    """A Gaussian standard deviation is not positive"""


# ===== Measures =====

class InvalidLevels(IrsError, ValueError):
    """A quantization level count is outside [2, 256]"""


class NoValidPairs(IrsError, ValueError):
    """An offset does not fit inside the image"""


# ===== Calibration =====

class DegenerateColumn(IrsError, ValueError):
    """A measure has zero variance across the corpus"""


class TooFewSamples(IrsError, ValueError):
    """Fewer samples than a correlation estimate needs"""


class EmptyCorpus(IrsError, ValueError):
    """A real or fake corpus has no measurable images"""


class ZeroRealMean(IrsError, ValueError):
    """A real-corpus measure mean is zero, so vectors cannot be normalized by it"""


class ZeroFakeMean(IrsError, ValueError):
    """A calibrated fake-corpus mean is zero or not finite, so no re-scaling weight exists"""


class MissingReferenceFile(IrsError, FileNotFoundError):
    """A calibration profile file does not exist"""


class ProfileFormatError(IrsError, ValueError):
    """A profile document is malformed, has unknown fields or a wrong version"""


# ===== Scoring =====

class NegativeRadius(IrsError, ValueError):
    """A pentagon radius is below zero"""


class NonFiniteRadius(IrsError, ValueError):
    """A pentagon radius is NaN or infinite"""


class InvalidThreshold(IrsError, ValueError):
    """A decision threshold is not a positive finite number"""


# ===== Harness / configuration =====

class NoImagesFound(IrsError, FileNotFoundError):
    """A corpus directory holds no supported image file"""


class ConfigError(IrsError, ValueError):
    """A settings file or environment value is invalid"""


class IoError(IrsError, OSError):
    """A corpus directory or report file cannot be read or written"""

"""Exception hierarchy. Everything derives from TexpyrError so callers can catch once."""


class TexpyrError(Exception):
    pass


class DecodeError(TexpyrError, ValueError):
    pass


class UnsupportedFormat(TexpyrError, ValueError):
    pass


class ChannelCountError(TexpyrError, ValueError):
    pass


class DimensionMismatch(TexpyrError, ValueError):
    pass


class InvalidLevelCount(TexpyrError, ValueError):
    pass


class ImageTooSmall(TexpyrError, ValueError):
    pass


class InvalidTargetSize(TexpyrError, ValueError):
    pass


class OffsetOutOfRange(TexpyrError, ValueError):
    pass


class EmptyPairSet(TexpyrError, ValueError):
    pass


class NotNormalized(TexpyrError, ValueError):
    pass


class EmptyImage(TexpyrError, ValueError):
    pass


class DegenerateAbundance(TexpyrError, ValueError):
    pass


class EmptyCorpus(TexpyrError, ValueError):
    pass


class UnreadableDirectory(TexpyrError, OSError):
    pass


class ClassTooSmall(TexpyrError, ValueError):
    pass


class EmptySet(TexpyrError, ValueError):
    pass


class SchemaMismatch(TexpyrError, ValueError):
    pass


class SingularCovariance(TexpyrError, ValueError):
    pass


class DegenerateClass(TexpyrError, ValueError):
    pass


class EmptyTrainSet(TexpyrError, ValueError):
    pass


class EmptyTestSet(TexpyrError, ValueError):
    pass


class ExtractionError(TexpyrError):
    """A descriptor failed on one image; carries where it happened."""

    def __init__(self, message, source_id=None, level=None, channel=None):
        self.source_id = source_id
        self.level = level
        self.channel = channel
        where = ", ".join(
            f"{k}={v}" for k, v in (("image", source_id), ("level", level), ("channel", channel))
            if v is not None
        )
        super().__init__(f"{message} ({where})" if where else message)

"""Exception hierarchy shared by every spoofaug module."""


class SpoofAugError(Exception):
    """Base class for all toolkit errors."""


# audio I/O
class UnsupportedFormatError(SpoofAugError, ValueError):
    pass


class CorruptHeaderError(SpoofAugError, ValueError):
    pass


class EmptyBufferError(SpoofAugError, ValueError):
    pass


# STFT
class SignalTooShortError(SpoofAugError, ValueError):
    pass


class NonInvertibleConfigError(SpoofAugError, ValueError):
    pass


class EmptySpectrogramError(SpoofAugError, ValueError):
    pass


# masking
class EmptyDimsError(SpoofAugError, ValueError):
    pass


class DimsMismatchError(SpoofAugError, ValueError):
    pass


# filters
class InvalidCutoffError(SpoofAugError, ValueError):
    pass


class InvalidLengthError(SpoofAugError, ValueError):
    pass


# codec
class EncoderUnavailableError(SpoofAugError, RuntimeError):
    pass


class SubprocessFailedError(SpoofAugError, RuntimeError):
    def __init__(self, command, returncode, stderr):
        self.command = list(command)
        self.returncode = returncode
        self.stderr = stderr
        tail = stderr.strip().splitlines()[-3:] if stderr else []
        super().__init__(
            f"{self.command[0]} exited with code {returncode}: " + " | ".join(tail)
        )


class OutputUnreadableError(SpoofAugError, RuntimeError):
    pass


class SampleRateChangedError(SpoofAugError, RuntimeError):
    pass


# features
class FormatError(SpoofAugError, ValueError):
    pass


class ShapeError(SpoofAugError, ValueError):
    pass


# metrics
class ParseError(SpoofAugError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class DuplicateUttIdError(ParseError):
    def __init__(self, utt_id, first_line, second_line):
        self.utt_id = utt_id
        self.lines = (first_line, second_line)
        msg = f"duplicate utt_id {utt_id!r}"
        if first_line is not None:
            msg += f" (first seen on line {first_line})"
        super().__init__(msg, line=second_line)


class UnknownLabelError(ParseError):
    pass


class DegenerateSetError(SpoofAugError, ValueError):
    pass


class UniverseMismatchError(SpoofAugError, ValueError):
    pass


class LabelConflictError(SpoofAugError, ValueError):
    pass


class NonPositiveWeightError(SpoofAugError, ValueError):
    pass


class MissingTagError(SpoofAugError, ValueError):
    pass


# cli / pipeline
class ConfigError(SpoofAugError, ValueError):
    pass


class SampleRateMismatchError(SpoofAugError, ValueError):
    pass

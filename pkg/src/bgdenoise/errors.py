"""
Exceptions raised by the denoising engines, the PGM codec and the pipeline model.
"""

from typing import Optional


class BgDenoiseError(Exception):
    """
    Base class of every error raised on purpose by this package.
    """


class ParameterError(BgDenoiseError, ValueError):
    """
    A caller-supplied value violates an operation's precondition.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class PgmFormatError(BgDenoiseError, ValueError):
    """
    A byte sequence is not a binary PGM image this package can read.
    :param field: the header field or section that failed to parse
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"invalid PGM {field}: {message}")


class PgmMagicError(PgmFormatError):
    def __init__(self, found: bytes):
        super().__init__("magic", f"expected b'P5', found {found!r}")


class PgmDimensionError(PgmFormatError):
    pass


class PgmMaxvalError(PgmFormatError):
    def __init__(self, maxval: str):
        self.maxval = maxval
        super().__init__("maxval", f"unsupported maxval {maxval}, only 255 is read")


class PgmTruncatedError(PgmFormatError):
    pass


class ScheduleViolation(BgDenoiseError, RuntimeError):
    """
    The streaming pipeline model tried to use a value its schedule has not produced.
    """

    def __init__(self, cycle: int, resource: str, detail: Optional[str] = None):
        self.cycle = cycle
        self.resource = resource
        message = f"schedule violation at cycle {cycle} on {resource}"
        if detail:
            message += f": {detail}"
        super().__init__(message)

from enum import Enum


class ArithmeticMode(Enum):
    """
    How the grid blur multiplies by its Gaussian weights.

    - FLOAT: exact double-precision weights.
    - SHIFT: weights rounded to powers of two, so every product is a shift.
    """

    FLOAT = "float"
    SHIFT = "shift"

    def __str__(self) -> str:
        return self.value


class InterpolationWeights(Enum):
    """
    Orientation of the trilinear coefficients used when slicing the blurred grid.

    - STANDARD: corner offset 0 gets 1 - frac, offset 1 gets frac.
    - LITERAL: corner offset i gets |frac - i|, which favours the far corner.
    """

    STANDARD = "standard"
    LITERAL = "paper-literal"

    def __str__(self) -> str:
        return self.value


class EngineKind(Enum):
    REFERENCE = "reference"
    STREAMING = "streaming"
    BILATERAL = "bf"

    def __str__(self) -> str:
        return self.value

"""
Per-axis weights of the radius-1 grid blur, in exact and power-of-two form.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from bgdenoise.errors import ParameterError
from bgdenoise.reference.bilateral import gaussian_weight
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.types import ArithmeticMode

DEFAULT_BIT_BUDGET = 8

Exponent = Optional[int]


class BlurKernel(ABC):
    """
    A separable 3-tap kernel; the 3D weight of an offset is the product of its
    per-axis weights.
    """

    @abstractmethod
    def axis_weights(self, axis: int = 0) -> Tuple[float, float, float]:
        """
        Weights for the offsets -1, 0 and +1 along one grid axis (0 = x, 1 = y, 2 = z).
        """
        raise NotImplementedError()


@dataclass(frozen=True)
class GaussianKernel(BlurKernel):
    sigma_g: float

    def axis_weights(self, axis: int = 0) -> Tuple[float, float, float]:
        side = float(gaussian_weight(1.0, self.sigma_g))
        return side, 1.0, side


@dataclass(frozen=True)
class ShiftKernel(BlurKernel):
    """
    Power-of-two weights: each exponent e stands for 2^e and None is a zero weight.
    """

    exponents: Tuple[Tuple[Exponent, Exponent, Exponent], ...]
    bit_budget: int = DEFAULT_BIT_BUDGET

    def __post_init__(self):
        for axis in self.exponents:
            center = axis[1]
            assert center is not None, "the center weight is never zero"
            for exponent in axis:
                if exponent is None:
                    continue
                assert (
                    -self.bit_budget <= exponent <= 0
                ), f"exponent {exponent} outside budget"
                assert exponent <= center

    def axis_weights(self, axis: int = 0) -> Tuple[float, float, float]:
        return tuple(
            0.0 if exponent is None else 2.0**exponent
            for exponent in self.exponents[axis]
        )


def quantize_kernel_pow2(
    sigma_g: float, bit_budget: int = DEFAULT_BIT_BUDGET
) -> ShiftKernel:
    """
    Replace the side weight g(1) by the nearest power of two in the log domain.
    :param sigma_g: grid-space standard deviation
    :param bit_budget: largest right shift allowed; smaller weights become zero
    :return ShiftKernel: identical triples for the x, y and z axes
    """
    if not sigma_g > 0:
        raise ParameterError("sigma_g", f"must be positive, got {sigma_g}")
    if bit_budget < 1:
        raise ParameterError("bit_budget", f"must be at least 1, got {bit_budget}")
    side = float(gaussian_weight(1.0, sigma_g))
    exponent: Exponent = None
    if side > 0:
        exponent = min(0, math.floor(math.log2(side) + 0.5))
        if exponent < -bit_budget:
            exponent = None
    axis = (exponent, 0, exponent)
    return ShiftKernel((axis, axis, axis), bit_budget)


def resolve_kernel(
    params: DenoiseParams,
    mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> BlurKernel:
    """
    Turn an arithmetic mode into the kernel both grid engines blur with.
    An explicit kernel is returned unchanged.
    """
    if isinstance(mode, BlurKernel):
        return mode
    if mode == ArithmeticMode.SHIFT:
        return quantize_kernel_pow2(params.sigma_g, bit_budget)
    return GaussianKernel(params.sigma_g)

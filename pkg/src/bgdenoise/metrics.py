"""
Image quality metrics: mean structural similarity (MSSIM) and PSNR.
"""

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from bgdenoise.data.image import Image
from bgdenoise.errors import ParameterError

PEAK = 255.0


@dataclass(frozen=True)
class MssimConfig:
    c1: float = (0.01 * PEAK) ** 2
    c2: float = (0.03 * PEAK) ** 2
    window: int = 7

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ParameterError("c1/c2", "stabilizing constants must be positive")
        if self.window < 1 or self.window % 2 == 0:
            raise ParameterError("window", f"side must be odd, got {self.window}")


def _check_pair(a: Image, b: Image):
    if not a.same_size(b):
        raise ParameterError(
            "image", f"size mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def _window_sums(values: np.ndarray, window: int) -> np.ndarray:
    return sliding_window_view(values, (window, window)).sum(axis=(-2, -1))


def ssim_map(a: Image, b: Image, config: Optional[MssimConfig] = None) -> np.ndarray:
    """
    SSIM of every fully interior window position, uniform weights and biased
    (divide by N) variances.
    """
    config = config or MssimConfig()
    _check_pair(a, b)
    side = config.window
    if a.width < side or a.height < side:
        raise ParameterError(
            "image", f"{a.width}x{a.height} is smaller than the {side}x{side} window"
        )
    x = a.pixels.astype(np.int64)
    y = b.pixels.astype(np.int64)
    n = float(side * side)

    # integer window sums are exact
    mu_x = _window_sums(x, side) / n
    mu_y = _window_sums(y, side) / n
    var_x = _window_sums(x * x, side) / n - mu_x * mu_x
    var_y = _window_sums(y * y, side) / n - mu_y * mu_y
    cov = _window_sums(x * y, side) / n - mu_x * mu_y

    numerator = (2 * mu_x * mu_y + config.c1) * (2 * cov + config.c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + config.c1) * (var_x + var_y + config.c2)
    return numerator / denominator


def mssim(a: Image, b: Image, config: Optional[MssimConfig] = None) -> float:
    """
    Mean SSIM over all fully interior 7x7 windows.
    :return float: 1.0 for identical images, at most 1 otherwise
    """
    return float(ssim_map(a, b, config).mean())


def psnr(a: Image, b: Image) -> float:
    """
    Peak signal-to-noise ratio in dB; math.inf for identical images.
    """
    _check_pair(a, b)
    difference = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(difference * difference))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


class QualityMetric(ABC):
    """
    Scores how close a processed image is to a reference image.
    """

    name: str

    @abstractmethod
    def evaluate(self, reference: Image, candidate: Image) -> float:
        """
        :param reference: the clean image
        :param candidate: the image under test
        """
        raise NotImplementedError("Subclasses should implement this method")

    def compare(self, reference: Image, first: Image, second: Image) -> float:
        """
        Positive when `first` is closer to the reference than `second`.
        """
        return self.evaluate(reference, first) - self.evaluate(reference, second)


class MssimMetric(QualityMetric):
    name = "mssim"

    def __init__(self, config: Optional[MssimConfig] = None):
        self.config = config or MssimConfig()

    def evaluate(self, reference: Image, candidate: Image) -> float:
        return mssim(reference, candidate, self.config)


class PsnrMetric(QualityMetric):
    name = "psnr"

    def evaluate(self, reference: Image, candidate: Image) -> float:
        return psnr(reference, candidate)

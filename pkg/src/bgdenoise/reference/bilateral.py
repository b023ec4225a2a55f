"""
Brute-force bilateral filter, used as the quality oracle for the grid engines.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from bgdenoise.data.image import Image
from bgdenoise.reference.params import DenoiseParams

Real = Union[float, np.ndarray]


def gaussian_weight(d2: Real, sigma: float) -> Real:
    """
    Unnormalized Gaussian exp(-d2 / (2 sigma^2)) of a squared distance.
    :param d2: squared distance, scalar or array
    :param sigma: standard deviation
    """
    return np.exp(-np.asarray(d2, dtype=np.float64) / (2.0 * sigma * sigma))


@dataclass
class WeightedAccumulator:
    """
    Running numerator and denominator of a normalized weighted mean.
    Works on scalars and on numpy arrays alike.
    """

    numerator: Real = 0.0
    denominator: Real = 0.0

    def add(self, weight: Real, value: Real, mass: Real = 1.0):
        """
        Accumulate weight * value into the numerator and weight * mass into the
        denominator. For a grid cell the value is its intensity sum and the mass
        its pixel count.
        """
        self.numerator = self.numerator + weight * value
        self.denominator = self.denominator + weight * mass

    def normalized(self, empty: float = np.nan) -> Real:
        """
        :return: numerator / denominator, or `empty` where the denominator is 0
        """
        numerator = np.asarray(self.numerator, dtype=np.float64)
        denominator = np.asarray(self.denominator, dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            value = np.where(denominator > 0, numerator / denominator, empty)
        return value if value.ndim else float(value)


def round_to_intensity(values: np.ndarray) -> np.ndarray:
    """
    Round non-negative reals half-up and clamp them to [0, 255].
    """
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def bilateral_filter(image: Image, params: DenoiseParams) -> Image:
    """
    Evaluate the bilateral filter over the (2r+1)^2 square window of every pixel.
    Window positions outside the image are dropped and the weights renormalized.
    :param Image image: input image
    :param DenoiseParams params: window radius and both standard deviations
    :return Image: the filtered image
    """
    r = params.r
    height, width = image.shape
    pixels = image.pixels.astype(np.float64)
    codes = image.pixels.astype(np.int64)
    # range weight per absolute intensity difference
    range_lut = gaussian_weight(np.arange(256) ** 2, params.sigma_r)

    accumulator = WeightedAccumulator(np.zeros_like(pixels), np.zeros_like(pixels))
    for dx in range(-r, r + 1):
        if abs(dx) >= height:
            continue
        for dy in range(-r, r + 1):
            if abs(dy) >= width:
                continue
            spatial = float(gaussian_weight(dx * dx + dy * dy, params.sigma_s))
            # target pixels i whose neighbour i + (dx, dy) is inside the image
            rows = slice(max(0, -dx), height - max(0, dx))
            cols = slice(max(0, -dy), width - max(0, dy))
            source_rows = slice(max(0, dx), height - max(0, -dx))
            source_cols = slice(max(0, dy), width - max(0, -dy))
            difference = np.abs(codes[rows, cols] - codes[source_rows, source_cols])
            weight = spatial * range_lut[difference]
            source = pixels[source_rows, source_cols]
            accumulator.numerator[rows, cols] += weight * source
            accumulator.denominator[rows, cols] += weight
    return Image(round_to_intensity(accumulator.normalized()))

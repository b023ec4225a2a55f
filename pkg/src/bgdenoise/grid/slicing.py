"""
Trilinear slicing of the blurred grid and the three-pass grid engine.
"""

from typing import Union

import numpy as np

from bgdenoise.data.image import Image
from bgdenoise.grid.blur import BlurredGrid, blur_grid
from bgdenoise.grid.core import (
    construct_grid,
    fraction_table,
    intensity_coordinates,
    intensity_lut,
    rounded_index,
)
from bgdenoise.grid.kernel import BlurKernel, DEFAULT_BIT_BUDGET
from bgdenoise.reference.bilateral import WeightedAccumulator, round_to_intensity
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.types import ArithmeticMode, InterpolationWeights


def corner_coefficients(frac, weights: InterpolationWeights):
    """
    Coefficients of the lower and upper corner along one axis.
    """
    if weights == InterpolationWeights.LITERAL:
        return frac, 1.0 - frac
    return 1.0 - frac, frac


def interpolate_row(
    lower: np.ndarray,
    upper: np.ndarray,
    fx: float,
    yi: np.ndarray,
    yf: np.ndarray,
    zi: np.ndarray,
    zf: np.ndarray,
    rounded_y: np.ndarray,
    rounded_z: np.ndarray,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
) -> np.ndarray:
    """
    Interpolate one output row between two blurred planes.

    Empty corners are left out and the remaining coefficients renormalized. Corners
    with a zero coefficient do not change the result whatever they hold.

    :param lower: blurred plane floor(x / r), shape (gy, gz)
    :param upper: blurred plane floor(x / r) + 1
    :param fx: fractional row coordinate, shared by the whole row
    :param yi: per-pixel integer column coordinate
    :param yf: per-pixel fractional column coordinate
    :param zi: per-pixel integer intensity coordinate
    :param zf: per-pixel fractional intensity coordinate
    :param rounded_y: per-pixel column cell the pixel was projected into
    :param rounded_z: per-pixel intensity cell the pixel was projected into
    :param weights: coefficient orientation
    :return: the output row as uint8
    """
    x_coefficients = corner_coefficients(fx, weights)
    y_coefficients = corner_coefficients(yf, weights)
    z_coefficients = corner_coefficients(zf, weights)

    accumulator = WeightedAccumulator(np.zeros(len(yi)), np.zeros(len(yi)))
    for i, plane in enumerate((lower, upper)):
        for j in range(2):
            for k in range(2):
                coefficient = x_coefficients[i] * y_coefficients[j] * z_coefficients[k]
                corner = plane[yi + j, zi + k]
                valid = ~np.isnan(corner)
                accumulator.add(
                    np.where(valid, coefficient, 0.0), np.where(valid, corner, 0.0)
                )

    values = accumulator.normalized()
    missing = np.isnan(values)
    if missing.any():
        assert (
            weights == InterpolationWeights.LITERAL
        ), "all interpolation corners empty"
        # only the far-corner orientation can give the own cell a zero coefficient
        own_plane = upper if fx >= 0.5 else lower
        values = np.where(missing, own_plane[rounded_y, rounded_z], values)
    return round_to_intensity(values)


def slice_image(
    image: Image,
    blurred: BlurredGrid,
    params: DenoiseParams,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
) -> Image:
    """
    Read the blurred grid at every pixel's feature coordinates.
    """
    r = params.r
    fractions = fraction_table(r)
    cols = np.arange(image.width)
    yi, yf = cols // r, fractions[cols % r]
    rounded_y = rounded_index(cols, r)
    z_lower, z_fraction = intensity_coordinates(params)
    z_rounded = intensity_lut(params)

    output = np.empty(image.shape, dtype=np.uint8)
    for x in range(image.height):
        row = image.pixels[x]
        xi = x // r
        output[x] = interpolate_row(
            blurred.values[xi],
            blurred.values[xi + 1],
            fractions[x % r],
            yi,
            yf,
            z_lower[row],
            z_fraction[row],
            rounded_y,
            z_rounded[row],
            weights,
        )
    return Image(output)


def bg_denoise(
    image: Image,
    params: DenoiseParams,
    mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> Image:
    """
    Denoise with the bilateral grid: construct, blur, then slice.
    """
    grid = construct_grid(image, params)
    blurred = blur_grid(grid, params, mode, bit_budget)
    return slice_image(image, blurred, params, weights)

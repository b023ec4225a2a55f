"""
Bilateral grid geometry and grid construction.

A pixel at row x, column y with intensity l has the feature vector
(x / r, y / r, l / (r * sigma_r / sigma_s)). Construction accumulates
(count, sum) into the cell at the feature vector rounded half-up per axis.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from bgdenoise.data.image import Image
from bgdenoise.errors import ParameterError
from bgdenoise.reference.params import DenoiseParams


@dataclass(frozen=True)
class FeatureVector:
    px: float
    py: float
    pz: float


@dataclass(frozen=True)
class GridCell:
    count: int
    sum: int

    @property
    def is_empty(self) -> bool:
        return self.count == 0


def grid_dimensions(
    params: DenoiseParams, width: int, height: int
) -> Tuple[int, int, int]:
    """
    :return: (gx, gy, gz) = (h // r + 2, w // r + 2, floor(255 / scale) + 2)
    """
    if width < 1:
        raise ParameterError("width", f"must be at least 1, got {width}")
    if height < 1:
        raise ParameterError("height", f"must be at least 1, got {height}")
    r = params.r
    return (
        height // r + 2,
        width // r + 2,
        math.floor(255 / params.range_scale) + 2,
    )


def feature_vector(
    row: int, col: int, intensity: int, params: DenoiseParams
) -> FeatureVector:
    return FeatureVector(
        row / params.r, col / params.r, intensity / params.range_scale
    )


def intensity_lut(params: DenoiseParams) -> np.ndarray:
    """
    Grid z index of every intensity, round-half-up of l / scale.
    """
    return np.floor(np.arange(256) / params.range_scale + 0.5).astype(np.int64)


def intensity_coordinates(params: DenoiseParams) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integer and fractional part of l / scale for every intensity l.
    """
    scaled = np.arange(256) / params.range_scale
    lower = np.floor(scaled)
    return lower.astype(np.int64), scaled - lower


def fraction_table(r: int) -> np.ndarray:
    """
    k / r for k in [0, r), the fractional grid coordinate of a pixel k past a
    block edge.
    """
    return np.arange(r, dtype=np.float64) / r


def rounded_index(positions: np.ndarray, r: int) -> np.ndarray:
    """
    Round-half-up of positions / r in exact integer arithmetic.
    """
    return (2 * np.asarray(positions, dtype=np.int64) + r) // (2 * r)


def cell_bit_widths(r: int) -> Tuple[int, int]:
    """
    Bits needed for a cell's count (at most r^2 pixels) and its intensity sum.
    """
    return math.ceil(math.log2(r * r + 1)), math.ceil(math.log2(255 * r * r + 1))


def pack_cells(counts: np.ndarray, sums: np.ndarray, r: int) -> np.ndarray:
    """
    One word per cell with the count above the intensity sum. Packed words add
    field by field, since a cell never holds more than r^2 pixels.
    """
    _, sum_bits = cell_bit_widths(r)
    counts = np.asarray(counts, dtype=np.int64)
    return (counts << sum_bits) | np.asarray(sums, dtype=np.int64)


def unpack_cells(words: np.ndarray, r: int) -> Tuple[np.ndarray, np.ndarray]:
    _, sum_bits = cell_bit_widths(r)
    return words >> sum_bits, words & ((1 << sum_bits) - 1)


def column_word(cells: np.ndarray, r: int) -> int:
    """
    Concatenate a z-column of packed cells into one memory word, z = gz-1 at the
    most significant end down to z = 0.
    """
    bits = sum(cell_bit_widths(r))
    word = 0
    for cell in np.asarray(cells)[::-1]:
        word = (word << bits) | int(cell)
    return word


def pack_column(counts: np.ndarray, sums: np.ndarray, r: int) -> int:
    count_bits, sum_bits = cell_bit_widths(r)
    assert np.all(np.asarray(counts) < (1 << count_bits)), "count overflows"
    assert np.all(np.asarray(sums) < (1 << sum_bits)), "sum overflows"
    return column_word(pack_cells(counts, sums, r), r)


def unpack_column(word: int, depth: int, r: int) -> Tuple[np.ndarray, np.ndarray]:
    count_bits, sum_bits = cell_bit_widths(r)
    counts = np.zeros(depth, dtype=np.int64)
    sums = np.zeros(depth, dtype=np.int64)
    for z in range(depth):
        sums[z] = word & ((1 << sum_bits) - 1)
        word >>= sum_bits
        counts[z] = word & ((1 << count_bits) - 1)
        word >>= count_bits
    return counts, sums


class Grid:
    """
    Dense (gx, gy, gz) accumulator of pixel counts and intensity sums.
    """

    def __init__(self, counts: np.ndarray, sums: np.ndarray):
        assert counts.shape == sums.shape and counts.ndim == 3
        self.counts = counts
        self.sums = sums

    @classmethod
    def empty(cls, dims: Tuple[int, int, int]) -> "Grid":
        return cls(np.zeros(dims, dtype=np.int64), np.zeros(dims, dtype=np.int64))

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.counts.shape

    def cell(self, x: int, y: int, z: int) -> GridCell:
        return GridCell(int(self.counts[x, y, z]), int(self.sums[x, y, z]))

    def plane(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        (counts, sums) of one x-plane; planes outside the grid are all zero.
        """
        if 0 <= index < self.dims[0]:
            return self.counts[index], self.sums[index]
        zeros = np.zeros(self.dims[1:], dtype=np.int64)
        return zeros, zeros

    def total_count(self) -> int:
        return int(self.counts.sum())

    def total_sum(self) -> int:
        return int(self.sums.sum())

    def occupied(self) -> np.ndarray:
        return np.argwhere(self.counts > 0)


def construct_grid(image: Image, params: DenoiseParams) -> Grid:
    """
    Project every pixel into its rounded cell and accumulate (1, intensity) there.
    :param Image image: source image
    :param DenoiseParams params: filter parameters
    :return Grid: grid of dimensions grid_dimensions(params, w, h)
    """
    dims = grid_dimensions(params, image.width, image.height)
    gx, gy, gz = dims
    rows = rounded_index(np.arange(image.height), params.r)
    cols = rounded_index(np.arange(image.width), params.r)
    depth = intensity_lut(params)[image.pixels]

    flat = (rows[:, None] * gy + cols[None, :]) * gz + depth
    size = gx * gy * gz
    counts = np.bincount(flat.ravel(), minlength=size)
    sums = np.bincount(
        flat.ravel(), weights=image.pixels.ravel().astype(np.float64), minlength=size
    )
    return Grid(
        counts.reshape(dims).astype(np.int64), sums.reshape(dims).astype(np.int64)
    )

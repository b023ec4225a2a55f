"""
Radius-1 Gaussian blur of the grid with joint numerator and denominator.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from bgdenoise.grid.core import Grid
from bgdenoise.grid.kernel import BlurKernel, DEFAULT_BIT_BUDGET, resolve_kernel
from bgdenoise.reference.bilateral import WeightedAccumulator
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.types import ArithmeticMode

EMPTY = np.nan


@dataclass
class BlurredGrid:
    """
    Normalized blurred values with their retained denominators.
    Cells with k == 0 hold the empty marker (NaN).
    """

    values: np.ndarray
    k: np.ndarray

    @property
    def dims(self) -> Tuple[int, int, int]:
        return self.values.shape

    def is_empty(self) -> np.ndarray:
        return np.isnan(self.values)

    def value(self, x: int, y: int, z: int) -> float:
        return float(self.values[x, y, z])


def blur_plane(
    counts: np.ndarray, sums: np.ndarray, kernel: BlurKernel
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Blur one x-plane from the three planes around it.
    :param counts: (3, gy, gz) pixel counts of planes p-1, p and p+1
    :param sums: (3, gy, gz) intensity sums of the same planes
    :param kernel: per-axis blur weights
    :return: (values, k) of plane p, each (gy, gz)
    """
    _, gy, gz = counts.shape
    padding = ((0, 0), (1, 1), (1, 1))
    padded_counts = np.pad(counts.astype(np.float64), padding)
    padded_sums = np.pad(sums.astype(np.float64), padding)
    wx, wy, wz = (kernel.axis_weights(axis) for axis in range(3))

    accumulator = WeightedAccumulator(np.zeros((gy, gz)), np.zeros((gy, gz)))
    for dx in range(3):
        for dy in range(3):
            for dz in range(3):
                weight = wx[dx] * wy[dy] * wz[dz]
                if weight == 0.0:
                    continue
                window = (dx, slice(dy, dy + gy), slice(dz, dz + gz))
                accumulator.add(weight, padded_sums[window], padded_counts[window])
    return accumulator.normalized(EMPTY), accumulator.denominator


def blur_grid(
    grid: Grid,
    params: DenoiseParams,
    mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
    bit_budget: int = DEFAULT_BIT_BUDGET,
) -> BlurredGrid:
    """
    Blur every plane of the grid; neighbours outside the grid count as empty cells.
    :param Grid grid: the constructed grid
    :param DenoiseParams params: filter parameters, source of sigma_g
    :param mode: FLOAT, SHIFT, or an explicit kernel
    :param int bit_budget: shift budget used when mode is SHIFT
    """
    kernel = resolve_kernel(params, mode, bit_budget)
    gx = grid.dims[0]
    values = np.empty(grid.dims, dtype=np.float64)
    k = np.empty(grid.dims, dtype=np.float64)
    for p in range(gx):
        planes = [grid.plane(q) for q in (p - 1, p, p + 1)]
        counts = np.stack([plane[0] for plane in planes])
        sums = np.stack([plane[1] for plane in planes])
        values[p], k[p] = blur_plane(counts, sums, kernel)
    return BlurredGrid(values, k)

"""
Lookup tables of the streaming engine.

- l1: intensity -> z cell written during construction
- ti_z_index, ti_z_frac: intensity -> integer and fractional z coordinate for slicing
- l2_offset, l2_frac: row phase cx -> (planes between the constructing row and
  the sliced row, fractional x coordinate of the sliced row)
- l3_offset, l3_frac: column phase cy -> (1 when the column lies left of its
  rounded block's origin, fractional y coordinate)
"""

from dataclasses import dataclass

import numpy as np

from bgdenoise.grid.core import fraction_table, intensity_coordinates, intensity_lut
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.state import counter_origin, pipeline_lag


@dataclass(frozen=True)
class Luts:
    l1: np.ndarray
    ti_z_index: np.ndarray
    ti_z_frac: np.ndarray
    l2_offset: np.ndarray
    l2_frac: np.ndarray
    l3_offset: np.ndarray
    l3_frac: np.ndarray


def build_luts(params: DenoiseParams) -> Luts:
    r = params.r
    origin = counter_origin(r)
    lag = pipeline_lag(r)
    fractions = fraction_table(r)
    phases = np.arange(r, dtype=np.int64)

    # row x = plane * r - origin + cx is sliced as row x - lag
    relative = phases - origin - lag
    l2_offset = -(relative // r)
    l2_frac = fractions[relative % r]

    l3_offset = (phases < origin).astype(np.int64)
    l3_frac = fractions[(phases - origin) % r]

    z_index, z_frac = intensity_coordinates(params)
    return Luts(
        l1=intensity_lut(params),
        ti_z_index=z_index,
        ti_z_frac=z_frac,
        l2_offset=l2_offset,
        l2_frac=l2_frac,
        l3_offset=l3_offset,
        l3_frac=l3_frac,
    )

"""
Block-position counters of the fused construct/blur/slice loop.

The loop visits stream positions (x, y) for x in [0, h + lag) and y in [0, w),
one per cycle. Three counters track where the current pixel sits relative to
the r x r grid blocks:

- cy: phase of column y inside its rounded block, (c0 + y) mod r
- py: rounded column block of y, (c0 + y) // r
- cx: phase of row x inside its rounded block, (c0 + x) mod r

with c0 = floor(r / 2), so that py and the plane counter equal y / r and
x / r rounded half-up. The state also carries the register file, the line
buffer and the lookup tables of a run.
"""

from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Deque, Optional, Tuple

import numpy as np

from bgdenoise.reference.params import DenoiseParams

if TYPE_CHECKING:
    from bgdenoise.streaming.luts import Luts


def counter_origin(r: int) -> int:
    return r // 2


def pipeline_lag(r: int) -> int:
    """
    Rows between constructing a pixel and slicing it: 2r + ceil(r / 2).
    """
    return 2 * r + (r + 1) // 2


@dataclass
class RegisterFile:
    """
    Registers between the stages and their memories, all held as z-columns.

    - grid_z: memory word of the construction block in flight, loaded when
      the block opens and stored back when it closes
    - reg_gf: packed 3 x 3 column window of the blur, planes p - 1, p, p + 1 by
      columns j - 1, j, j + 1
    - reg_ti: blurred 2 x 2 corner columns of slicing, lower and upper plane by
      left and right column
    """

    grid_z: int
    reg_gf: np.ndarray
    reg_ti: np.ndarray

    @classmethod
    def empty(cls, gz: int) -> "RegisterFile":
        return cls(
            grid_z=0,
            reg_gf=np.zeros((3, 3, gz), dtype=np.int64),
            reg_ti=np.full((2, 2, gz), np.nan),
        )


@dataclass(frozen=True)
class PipelineState:
    x: int
    y: int
    cx: int
    py: int
    cy: int
    plane: int
    cnt_y: int = 0
    cnt_z: int = 0
    cycle: int = 0
    stalls: int = 0
    registers: Optional[RegisterFile] = field(default=None, compare=False)
    lb: Optional[Deque[np.ndarray]] = field(default=None, compare=False)
    luts: Optional["Luts"] = field(default=None, compare=False)


def initial_state(params: DenoiseParams) -> PipelineState:
    origin = counter_origin(params.r)
    return PipelineState(x=0, y=0, cx=origin, py=0, cy=origin, plane=0)


def advance_counters(
    state: PipelineState, width: int, params: DenoiseParams
) -> PipelineState:
    """
    Step the counters past one stream position.
    :param PipelineState state: counters of the position just processed
    :param int width: image width
    :param DenoiseParams params: source of r
    :return PipelineState: counters of the next position, one cycle later
    """
    r = params.r
    cycle = state.cycle + 1
    if state.y == width - 1:
        # row phase wraps at the end of a block, opening the next grid plane
        if state.cx == r - 1:
            cx, plane = 0, state.plane + 1
        else:
            cx, plane = state.cx + 1, state.plane
        return replace(
            state,
            x=state.x + 1,
            y=0,
            cx=cx,
            plane=plane,
            py=0,
            cy=counter_origin(r),
            cycle=cycle,
        )
    if state.cy == r - 1:
        return replace(state, y=state.y + 1, py=state.py + 1, cy=0, cycle=cycle)
    return replace(state, y=state.y + 1, cy=state.cy + 1, cycle=cycle)


def advance_row(
    state: PipelineState, width: int, params: DenoiseParams, stalls: int = 0
) -> PipelineState:
    """
    Jump from the start of row x to the start of row x + 1, the same as `width`
    calls of advance_counters plus `stalls` suspended cycles. The counters move
    to the row's last column in closed form and advance_counters wraps the row.
    """
    assert state.y == 0
    r = params.r
    shifted = width - 1 + counter_origin(r)
    last = replace(
        state,
        y=width - 1,
        py=shifted // r,
        cy=shifted % r,
        cycle=state.cycle + width - 1 + stalls,
        stalls=state.stalls + stalls,
    )
    return advance_counters(last, width, params)


def column_counter_trace(
    width: int, params: DenoiseParams
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (py, cy) at every column of a row, identical for all rows.
    """
    shifted = np.arange(width, dtype=np.int64) + counter_origin(params.r)
    return shifted // params.r, shifted % params.r


def row_phase(x: int, r: int) -> int:
    return (counter_origin(r) + x) % r


def row_plane(x: int, r: int) -> int:
    return (counter_origin(r) + x) // r


def plane_first_row(plane: int, r: int) -> int:
    return max(0, plane * r - counter_origin(r))


def plane_last_row(plane: int, r: int) -> int:
    return (plane + 1) * r - counter_origin(r) - 1


def column_blocks(width: int, r: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    First and last column of every rounded column block of a row. Construction
    loads a block's z-column at its first column and stores it at its last.
    """
    origin = counter_origin(r)
    blocks = np.arange((width - 1 + origin) // r + 1, dtype=np.int64)
    starts = np.maximum(0, blocks * r - origin)
    ends = np.minimum(width - 1, (blocks + 1) * r - origin - 1)
    return starts, ends


def slicing_load_columns(width: int, r: int) -> np.ndarray:
    """
    Column of the row at which slicing loads blurred column k: 0 for k = 0 and
    (k - 1) r + 1 after that. Entry k is blurred column k.
    """
    columns = np.arange((width - 1) // r + 2, dtype=np.int64)
    loads = np.where(columns == 0, 0, (columns - 1) * r + 1)
    return loads[loads <= width - 1]

"""
Timing of the grid blur inside the streaming loop.

Construction and slicing advance one stream position per cycle. The blur of
plane p is released once column 1 of plane p + 1 is final in that plane's last
row. It then blurs one column per gz cycles on a single blur unit, loading
column j + 1 of planes p - 1, p and p + 1 just before it starts column j, and
storing column j into blurred slot p % 2 on the column's last step.

Column timing keeps every memory column in order:

- a grid column is loaded no earlier than the cycle of its final construction
  store (a load in the store's cycle reads the stored value)
- blurred column j of plane p is stored after slicing last read column j of
  plane p - 2, the plane that shares its slot
- grid column c of plane p - 1 is loaded before construction of plane p + 2
  stores over it
- slicing reads plane p only after its last column is stored

The first two delay the blur. The last two suspend the input (stall cycles) in
front of the construction store or slicing read that would come too early.
Positions map to cycles through the stalls inserted at or before them.
"""

import bisect
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from bgdenoise.grid.core import grid_dimensions
from bgdenoise.logger import LOGGER
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.state import (
    column_blocks,
    counter_origin,
    pipeline_lag,
    plane_first_row,
    plane_last_row,
    row_plane,
    slicing_load_columns,
)
from bgdenoise.types import InterpolationWeights

GRID_SLOTS = 3
BLURRED_SLOTS = 2
PORTS = 2

# stands in for "no constraint" in cycle bounds
UNBOUNDED = np.iinfo(np.int64).min // 4


def stall_budget(params: DenoiseParams, width: int) -> int:
    """
    Cycles the blur of one plane may take without stalling:
    2w - ceil(r/2) - r - (w mod r).
    """
    r = params.r
    return 2 * width - params.half_radius - r - width % r


def stall_condition_holds(params: DenoiseParams, width: int) -> bool:
    """
    True when gy * gz < stall_budget, i.e. the blur finishes in time and the
    pipeline never stalls on images at least 3r wide.
    """
    _, gy, gz = grid_dimensions(params, width, 1)
    return gy * gz < stall_budget(params, width)


def plane_release_row(plane: int, r: int) -> int:
    """
    Last row projected into grid plane `plane + 1`.
    """
    return plane_last_row(plane + 1, r)


def first_consuming_row(plane: int, r: int, weights: InterpolationWeights) -> int:
    """
    First output row whose slicing reads blurred plane `plane`.
    """
    if weights == InterpolationWeights.LITERAL:
        return max(0, (plane - 1) * r)
    return max(0, (plane - 1) * r + 1)


def last_consuming_row(
    plane: int, r: int, height: int, weights: InterpolationWeights
) -> Optional[int]:
    """
    Last output row whose slicing reads blurred plane `plane`, None when no row
    of the image does.
    """
    row = min(height - 1, (plane + 1) * r - 1)
    if row >= plane * r:
        return row
    upper_used = row % r > 0 or weights == InterpolationWeights.LITERAL
    if row >= (plane - 1) * r and upper_used:
        return row
    return None


class StallLedger:
    """
    Stalls inserted so far, sorted by the stream position they hold back.
    """

    def __init__(self):
        self.positions: List[int] = []
        self.lengths: List[int] = []
        self.__arrays: Optional[Tuple[np.ndarray, np.ndarray]] = None

    def insert(self, position: int, length: int):
        index = bisect.bisect_left(self.positions, position)
        if index < len(self.positions) and self.positions[index] == position:
            self.lengths[index] += length
        else:
            self.positions.insert(index, position)
            self.lengths.insert(index, length)
        self.__arrays = None

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        (stall positions, cumulative stall cycles with a leading 0)
        """
        if self.__arrays is None:
            lengths = np.asarray(self.lengths, dtype=np.int64)
            self.__arrays = (
                np.asarray(self.positions, dtype=np.int64),
                np.concatenate(([0], np.cumsum(lengths))).astype(np.int64),
            )
        return self.__arrays

    @property
    def total(self) -> int:
        return int(self.arrays()[1][-1])

    def cycles_of(self, positions) -> np.ndarray:
        stalled, offsets = self.arrays()
        positions = np.asarray(positions, dtype=np.int64)
        return positions + offsets[np.searchsorted(stalled, positions, side="right")]

    def positions_at(self, cycles) -> np.ndarray:
        """
        Stream position processed in each cycle, -1 for stall cycles.
        """
        stalled, offsets = self.arrays()
        cycles = np.asarray(cycles, dtype=np.int64)
        index = np.searchsorted(stalled + offsets[1:], cycles, side="right")
        positions = cycles - offsets[index]
        upcoming = np.append(stalled, np.iinfo(np.int64).max)[index]
        return np.where(positions >= upcoming, -1, positions)


@dataclass(frozen=True, eq=False)
class GfPlane:
    """
    Timing of one plane blur.
    :param column_starts: cycle of the first step of every blurred column
    :param load_cycles: cycle at which grid column c of the source planes is loaded
    :param stall: stall cycles inserted on behalf of this plane
    """

    plane: int
    release_row: int
    release_position: int
    column_starts: np.ndarray
    load_cycles: np.ndarray
    steps_per_column: int
    deadline_position: Optional[int]
    stall: int

    @property
    def start_cycle(self) -> int:
        return int(self.column_starts[0])

    @property
    def store_cycles(self) -> np.ndarray:
        return self.column_starts + self.steps_per_column - 1

    @property
    def finish_cycle(self) -> int:
        return int(self.column_starts[-1]) + self.steps_per_column - 1


class PipelineSchedule:
    def __init__(
        self,
        params: DenoiseParams,
        width: int,
        height: int,
        planes: List[GfPlane],
        stalls: StallLedger,
    ):
        self.params = params
        self.width = width
        self.height = height
        self.lag = pipeline_lag(params.r)
        self.dims = grid_dimensions(params, width, height)
        self.planes = planes
        self.stalls = stalls
        self.stall_positions, self.__cumulative = stalls.arrays()
        self.__by_row: Dict[int, List[GfPlane]] = {}
        for plane in planes:
            self.__by_row.setdefault(plane.release_row, []).append(plane)
        self.__starts = [plane.start_cycle for plane in planes]

    @property
    def steps_per_plane(self) -> int:
        return self.dims[1] * self.dims[2]

    @property
    def total_positions(self) -> int:
        return self.width * (self.height + self.lag)

    @property
    def total_stalls(self) -> int:
        return self.stalls.total

    @property
    def total_cycles(self) -> int:
        return self.total_positions + self.total_stalls

    def cycles_of(self, positions: np.ndarray) -> np.ndarray:
        return self.stalls.cycles_of(positions)

    def cycle_of(self, position: int) -> int:
        return int(self.cycles_of(np.array([position]))[0])

    def positions_at(self, cycles: np.ndarray) -> np.ndarray:
        return self.stalls.positions_at(cycles)

    def stalls_in_row(self, row: int) -> int:
        """
        Stall cycles inserted in front of positions of stream row `row`.
        """
        lo, hi = np.searchsorted(
            self.stall_positions, [row * self.width, (row + 1) * self.width]
        )
        return int(self.__cumulative[hi] - self.__cumulative[lo])

    def released_in_row(self, row: int) -> List[GfPlane]:
        return self.__by_row.get(row, [])

    def gf_progress(self, cycle: int) -> Tuple[int, int]:
        """
        (cnt_y, cnt_z) of the blur step running at `cycle`, (0, 0) when the blur
        unit is idle or waiting for a grid column.
        """
        index = bisect.bisect_right(self.__starts, cycle) - 1
        if index < 0 or self.planes[index].finish_cycle < cycle:
            return 0, 0
        plane = self.planes[index]
        column = int(np.searchsorted(plane.column_starts, cycle, side="right")) - 1
        step = cycle - int(plane.column_starts[column])
        if step >= plane.steps_per_column:
            return 0, 0
        return column, step


class _ConstructionPorts:
    """
    Ports of a grid slot that construction occupies in a given cycle: one for
    the load entering a column block, one for the store leaving it.
    """

    def __init__(self, params: DenoiseParams, width: int, height: int):
        self.r = params.r
        self.width = width
        self.height = height
        starts, ends = column_blocks(width, self.r)
        self.enters = np.zeros(width, dtype=np.int64)
        self.enters[starts] = 1
        self.leaves = np.zeros(width, dtype=np.int64)
        self.leaves[ends] = 1

    def used(self, positions: np.ndarray, slot: int) -> np.ndarray:
        rows, columns = np.divmod(positions, self.width)
        origin = counter_origin(self.r)
        active = (positions >= 0) & (rows < self.height)
        active &= (row_plane(rows, self.r) % GRID_SLOTS) == slot
        first = (rows == 0) | ((origin + rows) % self.r == 0)
        ports = self.leaves[columns] + self.enters[columns] * ~first
        return np.where(active, ports, 0)


def _column_starts(bounds: np.ndarray, steps: int) -> np.ndarray:
    """
    Earliest start of every column when column j starts no earlier than
    bounds[j] and at least `steps` cycles after column j - 1.
    """
    offsets = np.arange(len(bounds), dtype=np.int64) * steps
    return offsets + np.maximum.accumulate(bounds - offsets)


def _load_cycles(column_starts: np.ndarray) -> np.ndarray:
    loads = np.empty_like(column_starts)
    loads[0] = column_starts[0] - 2
    loads[1] = column_starts[0] - 1
    loads[2:] = column_starts[1:-1] - 1
    return loads


def _place_loads(
    bounds: np.ndarray,
    ready: np.ndarray,
    steps: int,
    blocked,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Column starts and load cycles of one plane blur with every load on a free
    grid port. A load that lands on a slot construction already uses twice is
    moved to an earlier free cycle when its column is final by then, and
    otherwise delays the column that needs it.
    """
    bounds = bounds.copy()
    moved: Dict[int, int] = {}
    while True:
        column_starts = _column_starts(bounds, steps)
        loads = _load_cycles(column_starts)
        for column, cycle in moved.items():
            loads[column] = cycle
        clashing = np.nonzero(blocked(loads))[0]
        if not len(clashing):
            return column_starts, loads

        column = int(clashing[0])
        floor = max(int(ready[column]), int(loads[column]) - steps)
        if column:
            floor = max(floor, int(loads[column - 1]) + 1)
        earlier = np.arange(int(loads[column]) - 1, floor - 1, -1, dtype=np.int64)
        free = earlier[~blocked(earlier)] if len(earlier) else earlier
        if len(free):
            moved[column] = int(free[0])
            continue

        later = int(loads[column]) + 1
        while blocked(np.array([later]))[0]:
            later += 1
        consumer = max(column - 1, 0)
        bounds[consumer] = max(bounds[consumer], later + (2 if column == 0 else 1))
        first_affected = 0 if consumer == 0 else column
        moved = {c: cycle for c, cycle in moved.items() if c < first_affected}


def plan_schedule(
    params: DenoiseParams,
    width: int,
    height: int,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
) -> PipelineSchedule:
    """
    Place every plane blur on the single blur unit, column by column, and insert
    the stalls that keep construction and slicing behind it.
    :param DenoiseParams params: filter parameters
    :param int width: image width, at least 2r
    :param int height: image height
    :param InterpolationWeights weights: decides which rows read which planes
    :return PipelineSchedule: plane timings and stall positions
    """
    r = params.r
    lag = pipeline_lag(r)
    gx, gy, gz = grid_dimensions(params, width, height)
    _, ends = column_blocks(width, r)
    blocks = len(ends)
    slicing_columns = slicing_load_columns(width, r)
    release_column = int(ends[1])
    constructed = row_plane(height - 1, r) + 1
    last_row = height - 1 + lag

    stalls = StallLedger()
    ports = _ConstructionPorts(params, width, height)
    planes: List[GfPlane] = []
    previous_finish = -1
    for p in range(gx):
        release_row = plane_release_row(p, r)
        if release_row > last_row:
            break
        release_position = release_row * width + release_column
        sources = [q for q in (p - 1, p, p + 1) if 0 <= q < constructed]

        # cycle at which each grid column of the newest source is final
        ready = np.full(gy, UNBOUNDED, dtype=np.int64)
        if sources:
            final_row = min(height - 1, plane_last_row(max(sources), r))
            ready[:blocks] = stalls.cycles_of(final_row * width + ends)

        bounds = np.full(gy, UNBOUNDED, dtype=np.int64)
        bounds[0] = max(
            int(stalls.cycles_of(release_position)) + 1,
            previous_finish + 1,
            ready[0] + 2,
            ready[1] + 1,
        )
        bounds[1:-1] = ready[2:] + 1
        reader = last_consuming_row(p - 2, r, height, weights) if p >= 2 else None
        if reader is not None:
            reads = (reader + lag) * width + slicing_columns[:gy]
            read_cycles = stalls.cycles_of(reads)
            count = len(read_cycles)
            bounds[:count] = np.maximum(bounds[:count], read_cycles - gz + 2)

        def blocked(cycles: np.ndarray) -> np.ndarray:
            positions = stalls.positions_at(cycles)
            taken = np.zeros(len(cycles), dtype=bool)
            for source in sources:
                taken |= ports.used(positions, source % GRID_SLOTS) >= PORTS
            return taken

        column_starts, loads = _place_loads(bounds, ready, gz, blocked)
        finish = int(column_starts[-1]) + gz - 1

        stall = 0
        overwrite_row = plane_first_row(p + 2, r)
        if p - 1 in sources and overwrite_row < height:
            stores = overwrite_row * width + ends
            needed = loads[:blocks] - stalls.cycles_of(stores) + 1
            shift = np.maximum.accumulate(np.maximum(needed, 0))
            added = np.diff(np.concatenate(([0], shift)))
            for column in np.nonzero(added > 0)[0]:
                stalls.insert(int(stores[column]), int(added[column]))
            stall += int(shift[-1])
            if stall:
                LOGGER.debug(
                    f"Plane {p}: holding construction of plane {p + 2} "
                    f"for {stall} cycles"
                )

        deadline: Optional[int] = None
        consuming_row = first_consuming_row(p, r, weights)
        if consuming_row < height:
            deadline = max(
                (consuming_row + lag) * width - 1 - width % r,
                (release_row + 1) * width,
            )
            deadline_cycle = int(stalls.cycles_of(deadline))
            if finish >= deadline_cycle:
                late = finish - deadline_cycle + 1
                stalls.insert(deadline, late)
                stall += late
                LOGGER.debug(
                    f"Plane {p}: blur finishes at cycle {finish}, "
                    f"stalling {late} cycles at position {deadline}"
                )
        planes.append(
            GfPlane(
                plane=p,
                release_row=release_row,
                release_position=release_position,
                column_starts=column_starts,
                load_cycles=loads,
                steps_per_column=gz,
                deadline_position=deadline,
                stall=stall,
            )
        )
        previous_finish = finish

    return PipelineSchedule(params, width, height, planes, stalls)


"""
Memory accesses of a streaming run, as the runner issues them.

Grid planes live in a ring of three slots and blurred planes in a ring of two.
Every access is recorded as (cycle, slot); the audit maps slots onto memory
partitions and counts accesses per partition and cycle.

- construction loads a z-column of slot plane % 3 when it enters a column block
  (except on a plane's first row, where the column starts empty) and stores it
  when it leaves the block
- the blur of plane p loads column j + 1 of planes p - 1, p and p + 1 just
  before it starts column j, and stores column j into slot p % 2 on its last step
- slicing loads column 0 of both blurred slots at y = 0 and column k >= 1 at
  y = (k - 1) r + 1
- the line buffer takes one enqueue per constructed pixel and one dequeue per
  sliced pixel

HazardMonitor follows the same accesses per memory column and fails the run on
the first load that overtakes its store or store that overtakes a pending load.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from bgdenoise.errors import ScheduleViolation
from bgdenoise.streaming.schedule import BLURRED_SLOTS, GRID_SLOTS, PORTS

__all__ = [
    "AccessRecorder",
    "AccessTrace",
    "BLURRED_SLOTS",
    "GRID_SLOTS",
    "HazardMonitor",
    "PORTS",
]

NEVER = -1


@dataclass(frozen=True)
class AccessTrace:
    grid_cycles: np.ndarray
    grid_slots: np.ndarray
    blurred_cycles: np.ndarray
    blurred_slots: np.ndarray
    lb_enqueue_cycles: np.ndarray
    lb_dequeue_cycles: np.ndarray
    emitted_per_iteration: np.ndarray
    grid_partitions: int = GRID_SLOTS
    blurred_partitions: int = BLURRED_SLOTS

    @classmethod
    def empty(cls) -> "AccessTrace":
        nothing = np.zeros(0, dtype=np.int64)
        return cls(nothing, nothing, nothing, nothing, nothing, nothing, nothing)


class AccessRecorder:
    """
    Collects the accesses of a run row by row and assembles the AccessTrace.
    """

    def __init__(
        self, grid_partitions: int = GRID_SLOTS, blurred_partitions: int = BLURRED_SLOTS
    ):
        self.grid_partitions = grid_partitions
        self.blurred_partitions = blurred_partitions
        self.__grid: List[np.ndarray] = []
        self.__grid_slots: List[np.ndarray] = []
        self.__blurred: List[np.ndarray] = []
        self.__blurred_slots: List[np.ndarray] = []
        self.__enqueued: List[np.ndarray] = []
        self.__dequeued: List[np.ndarray] = []
        self.__emitted: List[int] = []

    def grid(self, cycles: np.ndarray, slot: int):
        self.__grid.append(np.asarray(cycles, dtype=np.int64))
        self.__grid_slots.append(np.full(len(cycles), slot, dtype=np.int64))

    def blurred(self, cycles: np.ndarray, slot: int):
        self.__blurred.append(np.asarray(cycles, dtype=np.int64))
        self.__blurred_slots.append(np.full(len(cycles), slot, dtype=np.int64))

    def line_buffer(self, enqueued: np.ndarray, dequeued: np.ndarray):
        self.__enqueued.append(enqueued)
        self.__dequeued.append(dequeued)
        self.__emitted.append(len(dequeued))

    def trace(self) -> AccessTrace:
        def joined(parts: List[np.ndarray]) -> np.ndarray:
            if not parts:
                return np.zeros(0, dtype=np.int64)
            return np.concatenate(parts).astype(np.int64)

        return AccessTrace(
            grid_cycles=joined(self.__grid),
            grid_slots=joined(self.__grid_slots),
            blurred_cycles=joined(self.__blurred),
            blurred_slots=joined(self.__blurred_slots),
            lb_enqueue_cycles=joined(self.__enqueued),
            lb_dequeue_cycles=joined(self.__dequeued),
            emitted_per_iteration=np.asarray(self.__emitted, dtype=np.int64),
            grid_partitions=self.grid_partitions,
            blurred_partitions=self.blurred_partitions,
        )


class HazardMonitor:
    """
    Last store and last load cycle of every column of every memory slot.

    A load issued in the cycle of the store it depends on reads the stored value;
    a store issued in the cycle of a load it would overwrite is too early.
    """

    def __init__(self, gy: int):
        self.grid_tags = [NEVER] * GRID_SLOTS
        self.grid_stored = np.full((GRID_SLOTS, gy), NEVER, dtype=np.int64)
        self.grid_loaded = np.full((GRID_SLOTS, gy), NEVER, dtype=np.int64)
        self.blurred_tags = [NEVER] * BLURRED_SLOTS
        self.blurred_stored = np.full((BLURRED_SLOTS, gy), NEVER, dtype=np.int64)
        self.blurred_read = np.full((BLURRED_SLOTS, gy), NEVER, dtype=np.int64)

    def construction_stores(
        self, plane: int, columns: np.ndarray, cycles: np.ndarray, first_row: bool
    ):
        slot = plane % GRID_SLOTS
        if first_row and self.grid_tags[slot] != plane:
            pending = self.grid_loaded[slot, columns]
            _overtaken(
                cycles <= pending,
                cycles,
                columns,
                f"grid[{slot}]",
                f"plane {plane} stores over plane {self.grid_tags[slot]} before "
                f"the blur loaded it",
            )
            self.grid_tags[slot] = plane
            self.grid_stored[slot] = NEVER
            self.grid_loaded[slot] = NEVER
        self.grid_stored[slot, columns] = cycles

    def blur_loads(self, source: int, cycles: np.ndarray):
        slot = source % GRID_SLOTS
        if self.grid_tags[slot] != source:
            raise ScheduleViolation(
                int(cycles[0]),
                f"grid[{slot}]",
                f"plane {source} is not in its slot (slot holds "
                f"{self.grid_tags[slot]})",
            )
        columns = np.arange(len(cycles))
        _overtaken(
            cycles < self.grid_stored[slot],
            cycles,
            columns,
            f"grid[{slot}]",
            f"blur loads plane {source} before construction stored it",
        )
        self.grid_loaded[slot] = np.maximum(self.grid_loaded[slot], cycles)

    def blur_stores(self, plane: int, cycles: np.ndarray):
        slot = plane % BLURRED_SLOTS
        columns = np.arange(len(cycles))
        _overtaken(
            cycles <= self.blurred_read[slot],
            cycles,
            columns,
            f"blurred[{slot}]",
            f"blur of plane {plane} stores over plane {self.blurred_tags[slot]} "
            f"before slicing read it",
        )
        self.blurred_tags[slot] = plane
        self.blurred_stored[slot] = cycles
        self.blurred_read[slot] = NEVER

    def slicing_reads(self, plane: int, cycles: np.ndarray):
        slot = plane % BLURRED_SLOTS
        if self.blurred_tags[slot] != plane:
            raise ScheduleViolation(
                int(cycles[0]),
                f"blurred[{slot}]",
                f"plane {plane} not blurred yet (slot holds "
                f"{self.blurred_tags[slot]})",
            )
        columns = np.arange(len(cycles))
        _overtaken(
            cycles < self.blurred_stored[slot, columns],
            cycles,
            columns,
            f"blurred[{slot}]",
            f"slicing reads plane {plane} before the blur stored it",
        )
        self.blurred_read[slot, columns] = np.maximum(
            self.blurred_read[slot, columns], cycles
        )


def _overtaken(
    wrong: np.ndarray, cycles: np.ndarray, columns: np.ndarray, resource: str, what: str
):
    if not wrong.any():
        return
    first = int(np.argmax(wrong))
    raise ScheduleViolation(
        int(cycles[first]),
        resource,
        f"{what} (column {int(columns[first])}, {int(wrong.sum())} columns)",
    )

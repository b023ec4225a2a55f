"""
Cycle accounting of a streaming run, its JSON form and the memory-port audit.

JSON document (schema version 1)::

    {
      "schema_version": 1,
      "width": int, "height": int, "r": int,
      "total_cycles": int, "stall_cycles": int, "lb_peak": int,
      "partitions": [{"name": str, "max_accesses": int}, ...],
      "predicted_fps": [{"f_clk": float, "fps": float}, ...],
      "live_memory_cells": int,
      "arithmetic_ops_per_cycle": int,
      "packed_column_bits": int,
      "gf_planes": int,
      "output_start_iteration": int,
      "fallback": bool
    }
"""

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from bgdenoise.errors import ParameterError
from bgdenoise.grid.core import cell_bit_widths, grid_dimensions
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.state import pipeline_lag
from bgdenoise.streaming.trace import (
    AccessTrace,
    BLURRED_SLOTS,
    GRID_SLOTS,
    PORTS,
)

SCHEMA_VERSION = 1

# operations issued per cycle by each stage of the fused loop
OPS_PER_CYCLE = {
    # count and sum increment
    "construction": 2,
    # 27 weighted terms for numerator and denominator, 26 additions each, 1 division
    "blur": 2 * 27 + 2 * 26 + 1,
    # 8 corner weights (2 products each), 8 weighted values, 2 x 7 additions, 1 division
    "slicing": 8 * 2 + 8 + 2 * 7 + 1,
}


def lb_peak_entries(params: DenoiseParams, width: int, height: int) -> int:
    """
    Peak line-buffer occupancy: the buffer fills for `lag` rows, then each cycle
    enqueues one pixel before dequeuing one.
    """
    lag = pipeline_lag(params.r)
    if height > lag:
        return lag * width + 1
    return height * width


def live_memory_cells(params: DenoiseParams, width: int, height: int) -> int:
    """
    Grid cells held on chip: three grid planes, two blurred planes and the line buffer.
    """
    _, gy, gz = grid_dimensions(params, width, height)
    grid_cells = (GRID_SLOTS + BLURRED_SLOTS) * gy * gz
    return grid_cells + lb_peak_entries(params, width, height)


def packed_column_bits(params: DenoiseParams, width: int, height: int) -> int:
    _, _, gz = grid_dimensions(params, width, height)
    count_bits, sum_bits = cell_bit_widths(params.r)
    return gz * (count_bits + sum_bits)


@dataclass(frozen=True)
class CycleReport:
    width: int
    height: int
    r: int
    total_cycles: int
    stall_cycles: int
    lb_peak: int
    max_partition_accesses: Dict[str, int]
    live_memory_cells: int
    packed_column_bits: int
    gf_planes: int
    output_start_iteration: int
    fallback: bool = False
    arithmetic_ops_per_cycle: int = sum(OPS_PER_CYCLE.values())
    trace: Optional[AccessTrace] = field(default=None, compare=False, repr=False)

    @property
    def iterations(self) -> int:
        return self.height + self.output_start_iteration

    def predicted_fps(self, f_clk: float) -> float:
        return f_clk / self.total_cycles

    def to_dict(self, f_clk_list: Iterable[float] = ()) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "width": self.width,
            "height": self.height,
            "r": self.r,
            "total_cycles": self.total_cycles,
            "stall_cycles": self.stall_cycles,
            "lb_peak": self.lb_peak,
            "partitions": [
                {"name": name, "max_accesses": accesses}
                for name, accesses in self.max_partition_accesses.items()
            ],
            "predicted_fps": [
                {"f_clk": float(f_clk), "fps": self.predicted_fps(f_clk)}
                for f_clk in f_clk_list
            ],
            "live_memory_cells": self.live_memory_cells,
            "arithmetic_ops_per_cycle": self.arithmetic_ops_per_cycle,
            "packed_column_bits": self.packed_column_bits,
            "gf_planes": self.gf_planes,
            "output_start_iteration": self.output_start_iteration,
            "fallback": self.fallback,
        }

    def to_json(self, f_clk_list: Iterable[float] = (), indent: int = 2) -> str:
        return json.dumps(self.to_dict(f_clk_list), indent=indent)


def _partition_counts(
    cycles: np.ndarray, slots: np.ndarray, partitions: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    :return: (cycle, partition, access count) of every busy (cycle, partition) pair
    """
    keys = cycles * partitions + slots % partitions
    unique, counts = np.unique(keys, return_counts=True)
    return unique // partitions, unique % partitions, counts


def max_partition_accesses(trace: AccessTrace) -> Dict[str, int]:
    result: Dict[str, int] = {}
    for memory, cycles, slots, partitions in (
        ("grid", trace.grid_cycles, trace.grid_slots, trace.grid_partitions),
        (
            "blurred",
            trace.blurred_cycles,
            trace.blurred_slots,
            trace.blurred_partitions,
        ),
    ):
        _, partition, counts = _partition_counts(cycles, slots, partitions)
        for index in range(partitions):
            selected = counts[partition == index]
            result[f"{memory}[{index}]"] = int(selected.max()) if len(selected) else 0
    for name, cycles in (
        ("lb.enqueue", trace.lb_enqueue_cycles),
        ("lb.dequeue", trace.lb_dequeue_cycles),
    ):
        _, counts = np.unique(cycles, return_counts=True)
        result[name] = int(counts.max()) if len(counts) else 0
    return result


@dataclass(frozen=True)
class AuditResult:
    passed: bool
    violations: List[Tuple[int, str, int]]

    @property
    def verdict(self) -> str:
        return "II=1 feasible" if self.passed else "II=1 infeasible"

    def to_dict(self, limit: int = 20) -> dict:
        return {
            "passed": self.passed,
            "verdict": self.verdict,
            "violation_count": len(self.violations),
            "violations": [
                {"cycle": cycle, "partition": partition, "accesses": count}
                for cycle, partition, count in self.violations[:limit]
            ],
        }


def audit_memory_accesses(report: CycleReport) -> AuditResult:
    """
    Check that no grid or blurred-grid partition serves more than two accesses in
    any cycle and that the line buffer sees at most one enqueue and one dequeue.
    :param CycleReport report: a report whose access trace was recorded
    :return AuditResult: the verdict and every offending (cycle, partition, count)
    """
    trace = report.trace
    if trace is None:
        raise ParameterError("report", "the run did not record an access trace")

    violations: List[Tuple[int, str, int]] = []
    for memory, cycles, slots, partitions in (
        ("grid", trace.grid_cycles, trace.grid_slots, trace.grid_partitions),
        (
            "blurred",
            trace.blurred_cycles,
            trace.blurred_slots,
            trace.blurred_partitions,
        ),
    ):
        cycle, partition, counts = _partition_counts(cycles, slots, partitions)
        for index in np.nonzero(counts > PORTS)[0]:
            violations.append(
                (int(cycle[index]), f"{memory}[{partition[index]}]", int(counts[index]))
            )
    for name, cycles in (
        ("lb.enqueue", trace.lb_enqueue_cycles),
        ("lb.dequeue", trace.lb_dequeue_cycles),
    ):
        unique, counts = np.unique(cycles, return_counts=True)
        for index in np.nonzero(counts > 1)[0]:
            violations.append((int(unique[index]), name, int(counts[index])))
    violations.sort()
    return AuditResult(not violations, violations)

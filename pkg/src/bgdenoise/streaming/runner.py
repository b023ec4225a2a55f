"""
Streaming bilateral grid engine.

One pass over the image rows fuses construction, blur and slicing. Only three
grid planes, two blurred planes and a line buffer of raw rows are live at any
time. Grid cells are held as packed (count, sum) words. Every row of the stream:

1. constructs row x into the grid slot of its plane (x < h),
2. slices row x - lag from the line buffer using the two blurred slots,
3. blurs the planes whose inputs became final in row x,
4. commits blurred planes whose blur has finished by the end of the row.

Each stage issues its memory accesses at the cycles of the schedule. They go to
a HazardMonitor, which fails the run on any access that overtakes another on
the same memory column, and to the access trace when one is recorded.

Blurred values are computed by the same routines as the three-pass engine, so
the output is bit-exact with bg_denoise for the same mode and weights.
"""

from collections import deque
from dataclasses import dataclass, replace
from typing import Deque, List, Optional, Tuple, Union

import numpy as np

from bgdenoise.data.image import Image
from bgdenoise.grid.blur import EMPTY, blur_plane
from bgdenoise.grid.core import (
    column_word,
    grid_dimensions,
    pack_cells,
    unpack_cells,
)
from bgdenoise.grid.kernel import BlurKernel, DEFAULT_BIT_BUDGET, resolve_kernel
from bgdenoise.grid.slicing import bg_denoise, interpolate_row
from bgdenoise.logger import LOGGER, LoggerLevel
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.luts import build_luts
from bgdenoise.streaming.report import (
    CycleReport,
    live_memory_cells,
    max_partition_accesses,
    packed_column_bits,
)
from bgdenoise.streaming.schedule import GfPlane, PipelineSchedule, plan_schedule
from bgdenoise.streaming.state import (
    PipelineState,
    RegisterFile,
    advance_row,
    column_blocks,
    column_counter_trace,
    initial_state,
    pipeline_lag,
    row_plane,
    slicing_load_columns,
)
from bgdenoise.streaming.trace import (
    AccessRecorder,
    AccessTrace,
    BLURRED_SLOTS,
    GRID_SLOTS,
    HazardMonitor,
)
from bgdenoise.types import ArithmeticMode, InterpolationWeights


@dataclass(frozen=True)
class StreamingConfig:
    """
    :param grid_partitions: memories holding the three grid slots (1 merges them)
    :param blurred_partitions: memories holding the two blurred slots
    :param record_trace: record per-cycle memory accesses for the audit
    """

    grid_partitions: int = GRID_SLOTS
    blurred_partitions: int = BLURRED_SLOTS
    record_trace: bool = True


class PlaneRing:
    """
    Fixed number of plane slots, each tagged with the plane it currently holds.
    """

    def __init__(self, slots: int, shape: Tuple[int, ...], fill, dtype):
        self.arrays = np.full((slots,) + shape, fill, dtype=dtype)
        self.tags = [-1] * slots

    def slot(self, plane: int) -> int:
        return plane % len(self.tags)


class _RowAccesses:
    """
    Memory accesses of the stages of one stream row, at the schedule's cycles.
    """

    def __init__(self, schedule: PipelineSchedule):
        self.schedule = schedule
        self.width = schedule.width
        self.block_starts, self.block_ends = column_blocks(
            schedule.width, schedule.params.r
        )
        self.block_columns = np.arange(len(self.block_ends))
        self.read_columns = slicing_load_columns(schedule.width, schedule.params.r)
        self.row_columns = np.arange(schedule.width, dtype=np.int64)

    def cycles(self, row: int, columns: np.ndarray) -> np.ndarray:
        return self.schedule.cycles_of(row * self.width + columns)

    def construction(self, row: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        (load cycles, store cycles) of the row's column blocks.
        """
        return (
            self.cycles(row, self.block_starts),
            self.cycles(row, self.block_ends),
        )

    def slicing(self, row: int) -> np.ndarray:
        return self.cycles(row, self.read_columns)

    def row(self, row: int) -> np.ndarray:
        return self.cycles(row, self.row_columns)


def _fallback(
    image: Image,
    params: DenoiseParams,
    kernel: BlurKernel,
    weights: InterpolationWeights,
) -> Tuple[Image, CycleReport]:
    LOGGER.warning(
        f"Width {image.width} is below 2r = {2 * params.r}; "
        f"using the three-pass engine"
    )
    lag = pipeline_lag(params.r)
    report = CycleReport(
        width=image.width,
        height=image.height,
        r=params.r,
        total_cycles=image.width * (image.height + lag),
        stall_cycles=0,
        lb_peak=0,
        max_partition_accesses={},
        live_memory_cells=live_memory_cells(params, image.width, image.height),
        packed_column_bits=packed_column_bits(params, image.width, image.height),
        gf_planes=0,
        output_start_iteration=lag,
        fallback=True,
        trace=AccessTrace.empty(),
    )
    return bg_denoise(image, params, kernel, weights), report


def run_streaming(
    image: Image,
    params: DenoiseParams,
    mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
    config: StreamingConfig = StreamingConfig(),
    bit_budget: int = DEFAULT_BIT_BUDGET,
    logger_level: LoggerLevel = LoggerLevel.INFO,
) -> Tuple[Image, CycleReport]:
    """
    Denoise an image with the streaming engine and account for its cycles.
    :param Image image: input image
    :param DenoiseParams params: filter parameters
    :param mode: FLOAT, SHIFT or an explicit blur kernel
    :param InterpolationWeights weights: slicing coefficient orientation
    :param StreamingConfig config: memory partitioning and trace recording
    :param int bit_budget: shift budget used when mode is SHIFT
    :param LoggerLevel logger_level: level of the package logger
    :return: the denoised image and the run's cycle report
    :raises ScheduleViolation: when an access overtakes another on the same
        memory column or slicing finds a plane not blurred yet
    """
    LOGGER.setLevel(logger_level.value)
    kernel = resolve_kernel(params, mode, bit_budget)
    r = params.r
    height, width = image.shape
    if width < 2 * r:
        return _fallback(image, params, kernel, weights)

    LOGGER.info(f"Streaming {width}x{height} image with {params}")
    lag = pipeline_lag(r)
    _, gy, gz = grid_dimensions(params, width, height)
    constructed = row_plane(height - 1, r) + 1
    luts = build_luts(params)
    schedule = plan_schedule(params, width, height, weights)
    accesses = _RowAccesses(schedule)
    monitor = HazardMonitor(gy)
    recorder: Optional[AccessRecorder] = None
    if config.record_trace:
        recorder = AccessRecorder(config.grid_partitions, config.blurred_partitions)

    py, cy = column_counter_trace(width, params)
    yi = py - luts.l3_offset[cy]
    yf = luts.l3_frac[cy]
    # one (count 1, intensity l) word per intensity
    pixel_words = pack_cells(np.ones(256), np.arange(256), r).astype(np.float64)

    grid = PlaneRing(GRID_SLOTS, (gy, gz), 0, np.int64)
    blurred = PlaneRing(BLURRED_SLOTS, (gy, gz), EMPTY, np.float64)
    occupancy, lb_peak = 0, 0
    pending: Deque[Tuple[GfPlane, np.ndarray]] = deque()
    output = np.empty(image.shape, dtype=np.uint8)
    state: PipelineState = replace(
        initial_state(params),
        registers=RegisterFile.empty(gz),
        lb=deque(),
        luts=luts,
    )
    nothing = np.zeros(0, dtype=np.int64)

    for x in range(height + lag):
        enqueue, dequeue = x < height, x >= lag
        # within a row each cycle enqueues before it dequeues
        if enqueue and dequeue:
            lb_peak = max(lb_peak, occupancy + 1)
        elif enqueue:
            lb_peak = max(lb_peak, occupancy + width)

        if enqueue:
            first_row = x == 0 or state.cx == 0
            _construct_row(
                grid, state, image.pixels[x], py, pixel_words, r, first_row
            )
            loads, stores = accesses.construction(x)
            monitor.construction_stores(
                state.plane, accesses.block_columns, stores, first_row
            )
            if recorder:
                slot = grid.slot(state.plane)
                if not first_row:
                    recorder.grid(loads, slot)
                recorder.grid(stores, slot)
            state.lb.append(image.pixels[x])
            occupancy += width
        if dequeue:
            row = state.lb.popleft()
            occupancy -= width
            reads = accesses.slicing(x)
            output[x - lag] = _slice_row(
                blurred, monitor, state, row, yi, yf, py, weights, reads
            )
            if recorder:
                for slot in range(BLURRED_SLOTS):
                    recorder.blurred(reads, slot)
        if recorder:
            cycles = accesses.row(x)
            recorder.line_buffer(
                cycles if enqueue else nothing, cycles if dequeue else nothing
            )

        for plane in schedule.released_in_row(x):
            values = _blur(
                grid, monitor, recorder, state, plane, constructed, kernel, r
            )
            pending.append((plane, values))
        row_end_cycle = schedule.cycle_of((x + 1) * width - 1)
        while pending and pending[0][0].finish_cycle <= row_end_cycle:
            plane, values = pending.popleft()
            monitor.blur_stores(plane.plane, plane.store_cycles)
            if recorder:
                recorder.blurred(plane.store_cycles, blurred.slot(plane.plane))
            slot = blurred.slot(plane.plane)
            blurred.arrays[slot] = values
            blurred.tags[slot] = plane.plane

        state = advance_row(state, width, params, schedule.stalls_in_row(x))
        cnt_y, cnt_z = schedule.gf_progress(state.cycle - 1)
        state = replace(state, cnt_y=cnt_y, cnt_z=cnt_z)

    assert state.cycle == schedule.total_cycles
    assert state.stalls == schedule.total_stalls
    if schedule.total_stalls:
        LOGGER.info(
            f"Blur lagged behind the input: {schedule.total_stalls} stall cycles"
        )

    trace = recorder.trace() if recorder else None
    report = CycleReport(
        width=width,
        height=height,
        r=r,
        total_cycles=state.cycle,
        stall_cycles=state.stalls,
        lb_peak=lb_peak,
        max_partition_accesses=max_partition_accesses(trace) if trace else {},
        live_memory_cells=live_memory_cells(params, width, height),
        packed_column_bits=packed_column_bits(params, width, height),
        gf_planes=len(schedule.planes),
        output_start_iteration=lag,
        trace=trace,
    )
    return Image(output), report


def _construct_row(
    grid: PlaneRing,
    state: PipelineState,
    row: np.ndarray,
    py: np.ndarray,
    pixel_words: np.ndarray,
    r: int,
    first_row: bool,
):
    slot = grid.slot(state.plane)
    _, gy, gz = grid.arrays.shape
    if first_row:
        grid.arrays[slot] = 0
        grid.tags[slot] = state.plane
    # packed words add field by field and stay exact in float64
    cells = py * gz + state.luts.l1[row]
    words = np.bincount(cells, weights=pixel_words[row], minlength=gy * gz)
    grid.arrays[slot] += words.astype(np.int64).reshape(gy, gz)
    # the register row leaves the row holding the last block it stored
    state.registers.grid_z = column_word(grid.arrays[slot, py[-1]], r)


def _slice_row(
    blurred: PlaneRing,
    monitor: HazardMonitor,
    state: PipelineState,
    row: np.ndarray,
    yi: np.ndarray,
    yf: np.ndarray,
    py: np.ndarray,
    weights: InterpolationWeights,
    reads: np.ndarray,
) -> np.ndarray:
    luts = state.luts
    xi = state.plane - int(luts.l2_offset[state.cx])
    fx = luts.l2_frac[state.cx]
    needed: List[int] = [xi]
    if fx > 0 or weights == InterpolationWeights.LITERAL:
        needed.append(xi + 1)
    for plane in needed:
        monitor.slicing_reads(plane, reads)
    lower = blurred.arrays[blurred.slot(xi)]
    upper = blurred.arrays[blurred.slot(xi + 1)]
    last = len(reads) - 1
    corners = state.registers.reg_ti
    corners[0] = lower[[max(last - 1, 0), last]]
    corners[1] = upper[[max(last - 1, 0), last]]
    return interpolate_row(
        lower,
        upper,
        fx,
        yi,
        yf,
        luts.ti_z_index[row],
        luts.ti_z_frac[row],
        py,
        luts.l1[row],
        weights,
    )


def _blur(
    grid: PlaneRing,
    monitor: HazardMonitor,
    recorder: Optional[AccessRecorder],
    state: PipelineState,
    plane: GfPlane,
    constructed: int,
    kernel: BlurKernel,
    r: int,
) -> np.ndarray:
    _, gy, gz = grid.arrays.shape
    words = np.zeros((3, gy + 1, gz), dtype=np.int64)
    for index, source in enumerate((plane.plane - 1, plane.plane, plane.plane + 1)):
        if source < 0 or source >= constructed:
            continue
        monitor.blur_loads(source, plane.load_cycles)
        if recorder:
            recorder.grid(plane.load_cycles, grid.slot(source))
        words[index, :gy] = grid.arrays[grid.slot(source)]
    # window of the last column, whose right neighbour lies outside the grid
    state.registers.reg_gf[:] = words[:, gy - 2 :]
    LOGGER.debug(
        f"Plane {plane.plane}: blur cycles {plane.start_cycle}..{plane.finish_cycle}"
    )
    counts, sums = unpack_cells(words[:, :gy], r)
    values, _ = blur_plane(counts, sums, kernel)
    return values

from bgdenoise.streaming.state import (
    PipelineState,
    RegisterFile,
    advance_counters,
    advance_row,
    column_counter_trace,
    initial_state,
    pipeline_lag,
)
from bgdenoise.streaming.luts import Luts, build_luts
from bgdenoise.streaming.schedule import (
    PipelineSchedule,
    plan_schedule,
    stall_budget,
    stall_condition_holds,
)
from bgdenoise.streaming.trace import AccessRecorder, AccessTrace, HazardMonitor
from bgdenoise.streaming.report import (
    AuditResult,
    CycleReport,
    audit_memory_accesses,
    live_memory_cells,
)
from bgdenoise.streaming.runner import StreamingConfig, run_streaming

from dataclasses import dataclass
from typing import Optional, Tuple

from bgdenoise.errors import ParameterError
from bgdenoise.grid.kernel import DEFAULT_BIT_BUDGET
from bgdenoise.logger import LoggerLevel
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.types import ArithmeticMode, EngineKind, InterpolationWeights

COMMANDS = ("denoise", "noise", "mssim", "psnr", "simulate", "bench")
DEFAULT_F_CLK = (100e6, 200e6, 300e6)


@dataclass(frozen=True)
class RunConfig:
    """
    Validated command-line request. Every numeric field is checked before any
    file is read.
    """

    command: str
    params: Optional[DenoiseParams] = None
    engine: EngineKind = EngineKind.STREAMING
    mode: ArithmeticMode = ArithmeticMode.FLOAT
    ti_weights: InterpolationWeights = InterpolationWeights.STANDARD
    bit_budget: int = DEFAULT_BIT_BUDGET
    inputs: Tuple[str, ...] = ()
    output: Optional[str] = None
    sigma: float = 30.0
    seed: int = 0
    f_clk: Tuple[float, ...] = DEFAULT_F_CLK
    grid_partitions: int = 3
    radii: Tuple[int, ...] = ()
    engines: Tuple[EngineKind, ...] = ()
    workers: int = 1
    logger_level: LoggerLevel = LoggerLevel.WARNING

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ParameterError("command", f"unknown command {self.command!r}")
        if self.bit_budget < 1:
            raise ParameterError(
                "bit_budget", f"must be at least 1, got {self.bit_budget}"
            )
        if not self.sigma >= 0:
            raise ParameterError("sigma", f"must be non-negative, got {self.sigma}")
        if self.seed < 0:
            raise ParameterError("seed", f"must be non-negative, got {self.seed}")
        if any(not f_clk > 0 for f_clk in self.f_clk):
            raise ParameterError("f_clk", "clock frequencies must be positive")
        if self.grid_partitions not in (1, 2, 3):
            raise ParameterError(
                "grid_partitions", f"must be 1, 2 or 3, got {self.grid_partitions}"
            )
        if any(radius < 1 for radius in self.radii):
            raise ParameterError("radius", "every radius must be a positive integer")
        if self.workers < 1:
            raise ParameterError("workers", f"must be at least 1, got {self.workers}")

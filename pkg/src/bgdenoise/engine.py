from abc import ABC, abstractmethod
from dataclasses import dataclass
from queue import Empty, Queue
from threading import Thread
from typing import Callable, Iterable, List, Optional, Union

from bgdenoise.data.image import Image
from bgdenoise.grid.kernel import BlurKernel, DEFAULT_BIT_BUDGET
from bgdenoise.grid.slicing import bg_denoise
from bgdenoise.logger import LOGGER, LoggerLevel
from bgdenoise.reference.bilateral import bilateral_filter
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.report import CycleReport
from bgdenoise.streaming.runner import StreamingConfig, run_streaming
from bgdenoise.types import ArithmeticMode, EngineKind, InterpolationWeights


class DenoiseEngine(ABC):
    """
    A way of turning a noisy image into a denoised one for fixed parameters.
    """

    kind: EngineKind

    def __init__(
        self,
        params: DenoiseParams,
        logger_level: LoggerLevel = LoggerLevel.INFO,
    ):
        self.params = params
        self.logger_level = logger_level
        LOGGER.setLevel(logger_level.value)

    @abstractmethod
    def denoise(self, image: Image) -> Image:
        """
        :param Image image: the image to filter
        :return Image: the filtered image
        """
        raise NotImplementedError()

    def cycle_report(self) -> Optional[CycleReport]:
        return None


class BilateralFilterEngine(DenoiseEngine):
    kind = EngineKind.BILATERAL

    def denoise(self, image: Image) -> Image:
        LOGGER.info(f"Brute-force bilateral filter on {image!r} with {self.params}")
        return bilateral_filter(image, self.params)


class ReferenceEngine(DenoiseEngine):
    kind = EngineKind.REFERENCE

    def __init__(
        self,
        params: DenoiseParams,
        mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
        weights: InterpolationWeights = InterpolationWeights.STANDARD,
        bit_budget: int = DEFAULT_BIT_BUDGET,
        logger_level: LoggerLevel = LoggerLevel.INFO,
    ):
        super().__init__(params, logger_level)
        self.mode = mode
        self.weights = weights
        self.bit_budget = bit_budget

    def denoise(self, image: Image) -> Image:
        LOGGER.info(f"Three-pass bilateral grid on {image!r} with {self.params}")
        return bg_denoise(image, self.params, self.mode, self.weights, self.bit_budget)


class StreamingEngine(ReferenceEngine):
    kind = EngineKind.STREAMING

    def __init__(
        self,
        params: DenoiseParams,
        mode: Union[ArithmeticMode, BlurKernel] = ArithmeticMode.FLOAT,
        weights: InterpolationWeights = InterpolationWeights.STANDARD,
        bit_budget: int = DEFAULT_BIT_BUDGET,
        config: StreamingConfig = StreamingConfig(),
        logger_level: LoggerLevel = LoggerLevel.INFO,
    ):
        super().__init__(params, mode, weights, bit_budget, logger_level)
        self.config = config
        self.__report: Optional[CycleReport] = None

    def denoise(self, image: Image) -> Image:
        output, self.__report = run_streaming(
            image,
            self.params,
            self.mode,
            self.weights,
            self.config,
            self.bit_budget,
            self.logger_level,
        )
        return output

    def cycle_report(self) -> Optional[CycleReport]:
        return self.__report


def create_engine(
    kind: EngineKind,
    params: DenoiseParams,
    mode: ArithmeticMode = ArithmeticMode.FLOAT,
    weights: InterpolationWeights = InterpolationWeights.STANDARD,
    bit_budget: int = DEFAULT_BIT_BUDGET,
    config: StreamingConfig = StreamingConfig(),
    logger_level: LoggerLevel = LoggerLevel.INFO,
) -> DenoiseEngine:
    if kind == EngineKind.BILATERAL:
        return BilateralFilterEngine(params, logger_level)
    if kind == EngineKind.REFERENCE:
        return ReferenceEngine(params, mode, weights, bit_budget, logger_level)
    return StreamingEngine(params, mode, weights, bit_budget, config, logger_level)


@dataclass(frozen=True)
class SweepPoint:
    kind: EngineKind
    params: DenoiseParams
    mode: ArithmeticMode = ArithmeticMode.FLOAT


class SweepRunner:
    """
    Runs a job for every sweep point and returns the results in the order of the
    points, regardless of how the work was scheduled.
    """

    def __init__(self, job: Callable[[SweepPoint], dict], workers: int = 1):
        self.job = job
        self.workers = max(1, workers)

    def run(self, points: Iterable[SweepPoint]) -> List[dict]:
        points = list(points)
        if self.workers == 1:
            return [self.job(point) for point in points]
        return self._run_parallel(points)

    def _work(self, point_queue: Queue, output_queue: Queue):
        while True:
            try:
                index, point = point_queue.get_nowait()
            except Empty:
                return
            try:
                output_queue.put((index, self.job(point), None))
            except Exception as error:
                output_queue.put((index, None, error))

    def _run_parallel(self, points: List[SweepPoint]) -> List[dict]:
        LOGGER.debug(
            f"Number of workers: {self.workers} Number of sweep points: {len(points)}"
        )
        point_queue: Queue = Queue()
        output_queue: Queue = Queue()
        for index, point in enumerate(points):
            point_queue.put((index, point))

        threads = []
        for _ in range(min(self.workers, len(points))):
            thread = Thread(target=self._work, args=(point_queue, output_queue))
            thread.start()
            threads.append(thread)
        for thread in threads:
            thread.join()

        results: List[Optional[dict]] = [None] * len(points)
        while not output_queue.empty():
            index, result, error = output_queue.get()
            if error is not None:
                raise error
            results[index] = result
        return results

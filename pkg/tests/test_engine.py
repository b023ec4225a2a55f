import io
import os
import unittest

import pandas as pd
from parameterized import parameterized

from bgdenoise.bench import BENCH_COLUMNS, run_bench, write_bench_csv
from bgdenoise.config import RunConfig
from bgdenoise.data.noise import add_gaussian_noise
from bgdenoise.engine import (
    BilateralFilterEngine,
    ReferenceEngine,
    StreamingEngine,
    SweepPoint,
    SweepRunner,
    create_engine,
)
from bgdenoise.errors import ParameterError
from bgdenoise.grid.slicing import bg_denoise
from bgdenoise.logger import LoggerLevel
from bgdenoise.metrics import mssim
from bgdenoise.reference.bilateral import bilateral_filter
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.runner import StreamingConfig
from bgdenoise.types import ArithmeticMode, EngineKind, InterpolationWeights
from tests.helpers import random_image, smooth_image


class TestEngines(unittest.TestCase):
    def setUp(self):
        self.image = random_image(40, 30, seed=17)
        self.params = DenoiseParams(3, 3.0, 40.0)

    @parameterized.expand(
        [
            ("bf", EngineKind.BILATERAL, BilateralFilterEngine),
            ("reference", EngineKind.REFERENCE, ReferenceEngine),
            ("streaming", EngineKind.STREAMING, StreamingEngine),
        ]
    )
    def test_create_engine(self, _, kind, engine_class):
        engine = create_engine(kind, self.params, logger_level=LoggerLevel.WARNING)
        self.assertIsInstance(engine, engine_class)
        self.assertEqual(engine.kind, kind)

    def test_grid_engines_agree(self):
        for mode in ArithmeticMode:
            reference = ReferenceEngine(self.params, mode)
            streaming = StreamingEngine(self.params, mode)
            self.assertEqual(
                reference.denoise(self.image), streaming.denoise(self.image)
            )

    def test_streaming_engine_keeps_report(self):
        engine = StreamingEngine(self.params)
        self.assertIsNone(engine.cycle_report())
        engine.denoise(self.image)
        report = engine.cycle_report()
        self.assertEqual((report.width, report.height), (40, 30))
        self.assertIsNone(ReferenceEngine(self.params).cycle_report())

    def test_engines_pass_weights(self):
        literal = InterpolationWeights.LITERAL
        engine = ReferenceEngine(self.params, weights=literal)
        self.assertEqual(
            engine.denoise(self.image),
            bg_denoise(self.image, self.params, weights=literal),
        )

    def test_bilateral_engine(self):
        engine = BilateralFilterEngine(self.params)
        self.assertEqual(
            engine.denoise(self.image), bilateral_filter(self.image, self.params)
        )

    def test_denoising_improves_similarity(self):
        original = smooth_image(160, 120, seed=3)
        noised = add_gaussian_noise(original, 30.0, 0)
        denoised = StreamingEngine(DenoiseParams(3, 4.0, 50.0)).denoise(noised)
        self.assertGreater(mssim(original, denoised), mssim(original, noised))


class TestSweepRunner(unittest.TestCase):
    def setUp(self):
        self.points = [
            SweepPoint(EngineKind.REFERENCE, DenoiseParams(r, 2.0, 20.0))
            for r in range(1, 9)
        ]

    @parameterized.expand([(1,), (3,), (16,)])
    def test_results_follow_point_order(self, workers):
        runner = SweepRunner(lambda point: {"r": point.params.r}, workers)
        results = runner.run(self.points)
        self.assertEqual([result["r"] for result in results], list(range(1, 9)))

    def test_errors_propagate(self):
        def job(point):
            if point.params.r == 5:
                raise ParameterError("radius", "rejected")
            return {}

        with self.assertRaises(ParameterError):
            SweepRunner(job, 4).run(self.points)


class TestBench(unittest.TestCase):
    def setUp(self):
        self.original = smooth_image(48, 36, seed=11)

    def test_table(self):
        frame = run_bench(
            self.original,
            [4, 2],
            4.0,
            50.0,
            engines=[EngineKind.STREAMING, EngineKind.REFERENCE, EngineKind.BILATERAL],
            workers=2,
            logger_level=LoggerLevel.WARNING,
        )
        self.assertEqual(list(frame.columns), BENCH_COLUMNS)
        self.assertEqual(len(frame), 6)
        self.assertEqual(frame["r"].tolist(), [2, 2, 2, 4, 4, 4])
        self.assertEqual(
            frame["engine"].tolist(), ["bf", "reference", "streaming"] * 2
        )
        self.assertTrue((frame["schema_version"] == 1).all())
        self.assertEqual(frame["mssim_noised"].nunique(), 1)

        streaming = frame[frame["engine"] == "streaming"]
        self.assertTrue((streaming["cycles"] > 0).all())
        self.assertFalse(frame[frame["engine"] == "bf"]["cycles"].notna().any())

        # both grid engines are bit-exact, so they score the same
        by_engine = frame.set_index(["r", "engine"])["mssim_vs_original"]
        for r in (2, 4):
            self.assertEqual(by_engine[(r, "reference")], by_engine[(r, "streaming")])

    def test_slicing_weights_and_bit_budget_reach_the_engines(self):
        params = DenoiseParams(3, 4.0, 50.0)
        mode, weights = ArithmeticMode.SHIFT, InterpolationWeights.LITERAL
        frame = run_bench(
            self.original,
            [3],
            4.0,
            50.0,
            mode=mode,
            logger_level=LoggerLevel.WARNING,
            weights=weights,
            bit_budget=2,
        )
        noised = add_gaussian_noise(self.original, 30.0, 0)
        expected = mssim(self.original, bg_denoise(noised, params, mode, weights, 2))
        for score in frame["mssim_vs_original"]:
            self.assertAlmostEqual(score, expected)

        standard = run_bench(
            self.original, [3], 4.0, 50.0, mode=mode, logger_level=LoggerLevel.WARNING
        )
        self.assertNotAlmostEqual(
            standard["mssim_vs_original"].iloc[0], expected, places=12
        )

    def test_csv(self):
        frame = run_bench(
            self.original, [3], 4.0, 50.0, logger_level=LoggerLevel.WARNING
        )
        text = write_bench_csv(frame)
        self.assertEqual(text.splitlines()[0], ",".join(BENCH_COLUMNS))
        parsed = pd.read_csv(io.StringIO(text))
        self.assertEqual(len(parsed), 2)
        self.assertEqual(parsed["engine"].tolist(), ["reference", "streaming"])


class TestRunConfig(unittest.TestCase):
    @parameterized.expand(
        [
            ("command", dict(command="sharpen")),
            ("bit_budget", dict(command="denoise", bit_budget=0)),
            ("sigma", dict(command="noise", sigma=-2.0)),
            ("seed", dict(command="noise", seed=-1)),
            ("f_clk", dict(command="simulate", f_clk=(100e6, 0.0))),
            ("grid_partitions", dict(command="simulate", grid_partitions=4)),
            ("radius", dict(command="bench", radii=(4, 0))),
            ("workers", dict(command="bench", workers=0)),
        ]
    )
    def test_rejects(self, field, options):
        with self.assertRaises(ParameterError) as context:
            RunConfig(**options)
        self.assertEqual(context.exception.field, field)

    def test_defaults(self):
        config = RunConfig("simulate", params=DenoiseParams(4, 8.0, 70.0))
        self.assertEqual(config.engine, EngineKind.STREAMING)
        self.assertEqual(config.mode, ArithmeticMode.FLOAT)
        self.assertEqual(config.ti_weights, InterpolationWeights.STANDARD)
        self.assertEqual(config.bit_budget, 8)
        self.assertEqual(config.f_clk, (100e6, 200e6, 300e6))


@unittest.skipUnless(os.environ.get("BGDENOISE_SLOW"), "set BGDENOISE_SLOW=1")
class TestFullHdQuality(unittest.TestCase):
    def test_grid_tracks_bilateral_filter(self):
        original = smooth_image(1920, 1080, seed=4)
        noised = add_gaussian_noise(original, 30.0, 0)
        params = DenoiseParams(7, 4.0, 50.0)
        grid = StreamingEngine(params, config=StreamingConfig(record_trace=False))
        grid_score = mssim(original, grid.denoise(noised))
        bf_score = mssim(original, BilateralFilterEngine(params).denoise(noised))
        self.assertGreater(grid_score, mssim(original, noised))
        self.assertLessEqual(abs(grid_score - bf_score), 0.05)


if __name__ == "__main__":
    unittest.main()

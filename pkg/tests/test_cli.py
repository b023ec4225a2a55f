import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest.mock import patch

from parameterized import parameterized

from bgdenoise import __version__
from bgdenoise.bench import run_bench
from bgdenoise.cli import main
from bgdenoise.data import read_pgm, write_pgm
from bgdenoise.engine import StreamingEngine
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.types import InterpolationWeights
from tests.helpers import random_image, smooth_image


class TestCli(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.image = smooth_image(64, 48, seed=2)
        self.input = self.path("input.pgm")
        write_pgm(self.image, self.input)

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.directory.name, name)

    def run_cli(self, *argv: str):
        stdout, stderr = io.StringIO(), io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(stderr):
            status = main(list(argv))
        return status, stdout.getvalue(), stderr.getvalue()

    def test_version(self):
        status, stdout, _ = self.run_cli("--version")
        self.assertEqual(status, 0)
        self.assertIn(__version__, stdout)

    def test_mssim_of_identical_images(self):
        status, stdout, _ = self.run_cli("mssim", self.input, self.input)
        self.assertEqual(status, 0)
        self.assertEqual(stdout.strip(), "1.000000")

    def test_psnr_of_identical_images(self):
        status, stdout, _ = self.run_cli("psnr", self.input, self.input)
        self.assertEqual(status, 0)
        self.assertEqual(stdout.strip(), "inf")

    def test_denoise(self):
        output = self.path("denoised.pgm")
        status, _, _ = self.run_cli(
            "denoise",
            "--in",
            self.input,
            "--out",
            output,
            "--radius",
            "3",
            "--sigma-s",
            "4",
            "--sigma-r",
            "50",
        )
        self.assertEqual(status, 0)
        expected = StreamingEngine(DenoiseParams(3, 4.0, 50.0)).denoise(self.image)
        self.assertEqual(read_pgm(output), expected)

    @parameterized.expand([("reference",), ("bf",)])
    def test_denoise_engines(self, engine):
        output = self.path(f"{engine}.pgm")
        status, _, _ = self.run_cli(
            "denoise",
            "--in",
            self.input,
            "--out",
            output,
            "--radius",
            "2",
            "--sigma-s",
            "2",
            "--sigma-r",
            "30",
            "--engine",
            engine,
            "--mode",
            "shift",
        )
        self.assertEqual(status, 0)
        self.assertEqual(read_pgm(output).shape, self.image.shape)

    def test_noise_is_seeded(self):
        first, second = self.path("first.pgm"), self.path("second.pgm")
        for output in (first, second):
            status, _, _ = self.run_cli(
                "noise", "--in", self.input, "--out", output, "--seed", "7"
            )
            self.assertEqual(status, 0)
        self.assertEqual(read_pgm(first), read_pgm(second))
        self.assertNotEqual(read_pgm(first), self.image)

    def test_simulate(self):
        output = self.path("simulated.pgm")
        status, stdout, _ = self.run_cli(
            "simulate",
            "--in",
            self.input,
            "--out",
            output,
            "--radius",
            "3",
            "--sigma-s",
            "3",
            "--sigma-r",
            "30",
            "--f-clk",
            "1e8",
        )
        self.assertEqual(status, 0)
        document = json.loads(stdout)
        self.assertEqual(document["schema_version"], 1)
        self.assertEqual((document["width"], document["height"]), (64, 48))
        self.assertTrue(document["audit"]["passed"])
        self.assertEqual(len(document["predicted_fps"]), 1)
        self.assertTrue(os.path.isfile(output))

    def test_simulate_audit_failure(self):
        write_pgm(random_image(64, 64, seed=31), self.input)
        status, stdout, _ = self.run_cli(
            "simulate",
            "--in",
            self.input,
            "--radius",
            "3",
            "--sigma-s",
            "3",
            "--sigma-r",
            "30",
            "--grid-partitions",
            "1",
        )
        self.assertEqual(status, 1)
        self.assertFalse(json.loads(stdout)["audit"]["passed"])

    def test_bench_to_stdout(self):
        status, stdout, _ = self.run_cli(
            "bench",
            "--in",
            self.input,
            "--radii",
            "2",
            "3",
            "--sigma-s",
            "4",
            "--sigma-r",
            "50",
        )
        self.assertEqual(status, 0)
        lines = stdout.splitlines()
        self.assertTrue(lines[0].startswith("schema_version,r,sigma_s,sigma_r,engine"))
        self.assertEqual(len(lines), 5)

    def test_bench_passes_slicing_weights_and_bit_budget(self):
        with patch("bgdenoise.cli.run_bench", wraps=run_bench) as bench:
            status, _, _ = self.run_cli(
                "bench",
                "--in",
                self.input,
                "--radii",
                "2",
                "--sigma-s",
                "4",
                "--sigma-r",
                "50",
                "--mode",
                "shift",
                "--bit-budget",
                "3",
                "--ti-weights",
                "paper-literal",
            )
        self.assertEqual(status, 0)
        options = bench.call_args.kwargs
        self.assertEqual(options["weights"], InterpolationWeights.LITERAL)
        self.assertEqual(options["bit_budget"], 3)

    def test_bench_to_file(self):
        output = self.path("bench.csv")
        status, stdout, _ = self.run_cli(
            "bench",
            "--in",
            self.input,
            "--out",
            output,
            "--radii",
            "2",
            "--sigma-s",
            "4",
            "--sigma-r",
            "50",
            "--engines",
            "bf",
        )
        self.assertEqual(status, 0)
        self.assertEqual(stdout, "")
        with open(output) as csv_file:
            self.assertEqual(len(csv_file.read().splitlines()), 2)

    @parameterized.expand(
        [
            ("zero_radius", ["--radius", "0", "--sigma-s", "4", "--sigma-r", "50"]),
            ("negative_sigma", ["--radius", "3", "--sigma-s", "-4", "--sigma-r", "50"]),
            ("missing_sigma", ["--radius", "3", "--sigma-s", "4"]),
            (
                "bad_mode",
                ["--radius", "3", "--sigma-s", "4", "--sigma-r", "50", "--mode", "x"],
            ),
        ]
    )
    def test_invalid_filter_arguments(self, _, arguments):
        status, stdout, stderr = self.run_cli(
            "denoise", "--in", self.input, "--out", self.path("out.pgm"), *arguments
        )
        self.assertEqual(status, 2)
        self.assertEqual(stdout, "")
        self.assertTrue(stderr.startswith("bgdenoise: error:"))
        self.assertFalse(os.path.exists(self.path("out.pgm")))

    def test_error_names_radius(self):
        _, _, stderr = self.run_cli(
            "simulate",
            "--in",
            self.input,
            "--radius",
            "0",
            "--sigma-s",
            "4",
            "--sigma-r",
            "50",
        )
        self.assertIn("radius", stderr)

    def test_unknown_flag(self):
        status, _, stderr = self.run_cli("mssim", self.input, self.input, "--fast")
        self.assertEqual(status, 2)
        self.assertIn("--fast", stderr)

    def test_unknown_command(self):
        status, _, _ = self.run_cli("sharpen", self.input)
        self.assertEqual(status, 2)

    def test_missing_input(self):
        status, _, stderr = self.run_cli("psnr", self.input, self.path("absent.pgm"))
        self.assertEqual(status, 2)
        self.assertIn("absent.pgm", stderr)

    def test_malformed_input(self):
        broken = self.path("broken.pgm")
        with open(broken, "wb") as pgm_file:
            pgm_file.write(b"P2\n2 2\n255\n0 0 0 0\n")
        status, _, stderr = self.run_cli("mssim", broken, self.input)
        self.assertEqual(status, 2)
        self.assertIn("magic", stderr)


if __name__ == "__main__":
    unittest.main()

"""
Command-line interface.

    bgdenoise denoise --in x.pgm --out y.pgm --radius R --sigma-s S --sigma-r T
                      [--engine streaming|reference|bf] [--mode float|shift]
                      [--ti-weights standard|paper-literal]
    bgdenoise noise --in x.pgm --out y.pgm --sigma 30 --seed N
    bgdenoise mssim a.pgm b.pgm
    bgdenoise psnr a.pgm b.pgm
    bgdenoise simulate --in x.pgm --radius R --sigma-s S --sigma-r T [--f-clk F ...]
    bgdenoise bench --in x.pgm --radii 4 7 15 --sigma-s S --sigma-r T [--out r.csv]

Exit status: 0 on success, 2 on invalid arguments or unreadable input, 1 when a
run fails (including a failed memory audit in `simulate`).
"""

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

from bgdenoise import __version__
from bgdenoise.bench import run_bench, write_bench_csv
from bgdenoise.config import DEFAULT_F_CLK, RunConfig
from bgdenoise.data.image import read_pgm, write_pgm
from bgdenoise.data.noise import add_gaussian_noise
from bgdenoise.engine import create_engine
from bgdenoise.errors import BgDenoiseError, ParameterError, PgmFormatError
from bgdenoise.grid.kernel import DEFAULT_BIT_BUDGET
from bgdenoise.logger import LOGGER, LoggerLevel
from bgdenoise.metrics import mssim, psnr
from bgdenoise.reference.params import DenoiseParams
from bgdenoise.streaming.report import audit_memory_accesses
from bgdenoise.streaming.runner import StreamingConfig, run_streaming
from bgdenoise.types import ArithmeticMode, EngineKind, InterpolationWeights

PROGRAM = "bgdenoise"


class UsageError(BgDenoiseError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _add_filter_arguments(parser: argparse.ArgumentParser, radius: bool = True):
    if radius:
        parser.add_argument(
            "--radius", type=int, required=True, help="window radius r"
        )
    parser.add_argument("--sigma-s", type=float, required=True, help="spatial sigma")
    parser.add_argument("--sigma-r", type=float, required=True, help="range sigma")
    parser.add_argument(
        "--mode",
        choices=[str(mode) for mode in ArithmeticMode],
        default=str(ArithmeticMode.FLOAT),
        help="grid blur arithmetic (default: %(default)s)",
    )
    parser.add_argument(
        "--bit-budget",
        type=int,
        default=DEFAULT_BIT_BUDGET,
        help="largest shift of the power-of-two kernel (default: %(default)s)",
    )
    parser.add_argument(
        "--ti-weights",
        choices=[str(weights) for weights in InterpolationWeights],
        default=str(InterpolationWeights.STANDARD),
        help="trilinear coefficient orientation (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROGRAM, description="Bilateral grid image denoising")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level",
        choices=[level.name.lower() for level in LoggerLevel],
        default="warning",
        help="logging level (default: %(default)s)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    denoise = commands.add_parser("denoise", help="filter a PGM image")
    denoise.add_argument("--in", dest="input", required=True)
    denoise.add_argument("--out", dest="output", required=True)
    _add_filter_arguments(denoise)
    denoise.add_argument(
        "--engine",
        choices=[str(kind) for kind in EngineKind],
        default=str(EngineKind.STREAMING),
        help="denoising engine (default: %(default)s)",
    )

    noise = commands.add_parser("noise", help="add seeded Gaussian noise")
    noise.add_argument("--in", dest="input", required=True)
    noise.add_argument("--out", dest="output", required=True)
    noise.add_argument("--sigma", type=float, default=30.0)
    noise.add_argument("--seed", type=int, default=0)

    for name, description in (("mssim", "mean SSIM"), ("psnr", "PSNR in dB")):
        metric = commands.add_parser(
            name, help=f"print the {description} of two images"
        )
        metric.add_argument("first")
        metric.add_argument("second")

    simulate = commands.add_parser("simulate", help="run the streaming pipeline model")
    simulate.add_argument("--in", dest="input", required=True)
    simulate.add_argument("--out", dest="output", help="also write the denoised image")
    _add_filter_arguments(simulate)
    simulate.add_argument(
        "--f-clk",
        type=float,
        nargs="+",
        default=list(DEFAULT_F_CLK),
        help="clock rates in Hz",
    )
    simulate.add_argument(
        "--grid-partitions",
        type=int,
        default=3,
        help="memories the three grid planes are spread over (default: %(default)s)",
    )

    bench = commands.add_parser("bench", help="sweep radii and engines, emit CSV")
    bench.add_argument("--in", dest="input", required=True)
    bench.add_argument("--out", dest="output", help="CSV path (default: stdout)")
    bench.add_argument("--radii", type=int, nargs="+", default=[4, 7, 15])
    _add_filter_arguments(bench, radius=False)
    bench.add_argument(
        "--engines",
        nargs="+",
        choices=[str(kind) for kind in EngineKind],
        default=[str(EngineKind.REFERENCE), str(EngineKind.STREAMING)],
    )
    bench.add_argument("--noise-sigma", type=float, default=30.0)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--workers", type=int, default=1)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Validate parsed arguments into a RunConfig; raises ParameterError naming the
    first offending field.
    """
    command = args.command
    params = None
    if command in ("denoise", "simulate"):
        params = DenoiseParams(args.radius, args.sigma_s, args.sigma_r)
    elif command == "bench":
        # sigmas shared by every radius of the sweep
        params = DenoiseParams(args.radii[0], args.sigma_s, args.sigma_r)

    if command in ("mssim", "psnr"):
        inputs = (args.first, args.second)
    else:
        inputs = (args.input,)
    for path in inputs:
        if not os.path.isfile(path):
            raise ParameterError("in", f"no such file: {path}")

    options = dict(
        command=command,
        params=params,
        inputs=inputs,
        output=getattr(args, "output", None),
        logger_level=LoggerLevel.from_name(args.log_level),
    )
    if hasattr(args, "mode"):
        options.update(
            mode=ArithmeticMode(args.mode),
            ti_weights=InterpolationWeights(args.ti_weights),
            bit_budget=args.bit_budget,
        )
    if command == "denoise":
        options.update(engine=EngineKind(args.engine))
    elif command == "noise":
        options.update(sigma=args.sigma, seed=args.seed)
    elif command == "simulate":
        options.update(f_clk=tuple(args.f_clk), grid_partitions=args.grid_partitions)
    elif command == "bench":
        options.update(
            radii=tuple(args.radii),
            engines=tuple(EngineKind(kind) for kind in args.engines),
            sigma=args.noise_sigma,
            seed=args.seed,
            workers=args.workers,
        )
    return RunConfig(**options)


def _denoise(config: RunConfig) -> int:
    image = read_pgm(config.inputs[0])
    engine = create_engine(
        config.engine,
        config.params,
        config.mode,
        config.ti_weights,
        config.bit_budget,
        StreamingConfig(record_trace=False),
        config.logger_level,
    )
    write_pgm(engine.denoise(image), config.output)
    return 0


def _noise(config: RunConfig) -> int:
    image = read_pgm(config.inputs[0])
    write_pgm(add_gaussian_noise(image, config.sigma, config.seed), config.output)
    return 0


def _metric(config: RunConfig) -> int:
    first, second = (read_pgm(path) for path in config.inputs)
    if config.command == "mssim":
        print(f"{mssim(first, second):.6f}")
    else:
        value = psnr(first, second)
        print("inf" if math.isinf(value) else f"{value:.4f}")
    return 0


def _simulate(config: RunConfig) -> int:
    image = read_pgm(config.inputs[0])
    output, report = run_streaming(
        image,
        config.params,
        config.mode,
        config.ti_weights,
        StreamingConfig(grid_partitions=config.grid_partitions),
        config.bit_budget,
        config.logger_level,
    )
    audit = audit_memory_accesses(report)
    document = report.to_dict(config.f_clk)
    document["audit"] = audit.to_dict()
    print(json.dumps(document, indent=2))
    if config.output:
        write_pgm(output, config.output)
    if not audit.passed:
        LOGGER.error(
            f"Memory audit failed with {len(audit.violations)} over-subscribed cycles"
        )
        return 1
    return 0


def _bench(config: RunConfig) -> int:
    original = read_pgm(config.inputs[0])
    frame = run_bench(
        original,
        config.radii,
        config.params.sigma_s,
        config.params.sigma_r,
        config.engines,
        config.mode,
        config.sigma,
        config.seed,
        config.workers,
        config.logger_level,
        weights=config.ti_weights,
        bit_budget=config.bit_budget,
    )
    text = write_bench_csv(frame, config.output)
    if text is not None:
        sys.stdout.write(text)
    return 0


COMMAND_HANDLERS = {
    "denoise": _denoise,
    "noise": _noise,
    "mssim": _metric,
    "psnr": _metric,
    "simulate": _simulate,
    "bench": _bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.
    :param argv: arguments without the program name; defaults to sys.argv[1:]
    :return int: the process exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else 0
    except (UsageError, ParameterError) as error:
        print(f"{PROGRAM}: error: {error}", file=sys.stderr)
        return 2

    LOGGER.setLevel(config.logger_level.value)
    try:
        return COMMAND_HANDLERS[config.command](config)
    except (ParameterError, PgmFormatError) as error:
        print(f"{PROGRAM}: error: {error}", file=sys.stderr)
        return 2
    except (BgDenoiseError, OSError) as error:
        print(f"{PROGRAM}: failed: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

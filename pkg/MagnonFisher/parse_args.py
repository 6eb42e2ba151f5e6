import argparse

from MagnonFisher import __version__
from MagnonFisher.dynamics import Mode
from MagnonFisher.env_settings import DERIVATIVES, settings
from MagnonFisher.measure import MeasurementKind
from MagnonFisher.sweep import preset_names

MEASUREMENTS = [str(MeasurementKind.HOMODYNE_Q), str(MeasurementKind.HOMODYNE_P), str(MeasurementKind.HETERODYNE), "ogm"]


def _common_parser(output_names: list[str]) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--version", action="version", version=f"magnon-fisher {__version__}")
    common.add_argument(
        "-c",
        "--config",
        help="TOML file with [system], optional [material] and [sweep] tables. Default is the baseline operating point.",
    )
    common.add_argument(
        "-s",
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override one system parameter, e.g. J_2pi_MHz=30 or T_mK=100. Repeatable.",
    )
    common.add_argument(
        "-o",
        "--out",
        help="Output file. Default is standard output.",
    )
    common.add_argument(
        "-f",
        "--format",
        choices=output_names,
        default=None,
        help=f"Output format. Default is '{settings.OUTPUT_FORMAT}' for sweeps and 'json' for single-point reports.",
    )
    common.add_argument(
        "-d",
        "--debug",
        default=settings.DEBUG,
        help=f"Enable debug output. Default is {'enabled' if settings.DEBUG else 'disabled'}.",
        action="store_true",
    )
    return common


def _derivative_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--derivative",
        choices=DERIVATIVES,
        default=settings.DERIVATIVE,
        help=f"How ∂/∂g is computed. Default is '{settings.DERIVATIVE}'.",
    )
    parser.add_argument(
        "--dg-rel",
        type=float,
        default=settings.DG_REL,
        help=f"Relative stencil step dg/g. Default is {settings.DG_REL}.",
    )


def _grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-p",
        "--preset",
        choices=preset_names(),
        help="Sweep reproducing one published figure.",
    )
    parser.add_argument(
        "--axis",
        nargs=4,
        metavar=("NAME", "START", "STOP", "POINTS"),
        help="Primary axis, NAME may carry a unit suffix (e.g. J_2pi_MHz 0 60 31).",
    )
    parser.add_argument(
        "--secondary",
        nargs=4,
        metavar=("NAME", "START", "STOP", "POINTS"),
        help="Optional secondary axis for 2-D maps.",
    )
    parser.add_argument(
        "--scale",
        choices=["linear", "log"],
        default="linear",
        help="Spacing of --axis. Default is 'linear'.",
    )
    parser.add_argument(
        "-j",
        "--jobs",
        type=int,
        default=settings.JOBS,
        help=f"Worker threads for the sweep. Default is {settings.JOBS} (MAGNON_FISHER_JOBS).",
    )


def build_parser(output_names: list[str] | None = None) -> argparse.ArgumentParser:
    output_names = output_names or ["csv", "json"]
    common = _common_parser(output_names)
    parser = argparse.ArgumentParser(
        prog="magnon-fisher",
        description="Quantum and classical Fisher information for estimating the photon-magnon coupling g.",
    )
    parser.add_argument(
        "-v",
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
        help="Show the version of the application",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("steady-state", parents=[common], help="Mean-field steady state and linearization checks.")

    stability = commands.add_parser("stability-map", parents=[common], help="Grid of stability verdicts.")
    _grid_options(stability)
    stability.add_argument(
        "--closed-form-check",
        action="store_true",
        help="Compare the characteristic polynomial with the symmetric-cavity closed forms.",
    )

    qfi = commands.add_parser("qfi", parents=[common], help="Global and subsystem QFIs with precision bounds.")
    _derivative_options(qfi)
    qfi.add_argument("-N", "--repetitions", type=int, default=1, help="Repetitions N of the bound 1/(N·F). Default is 1.")

    cfi = commands.add_parser("cfi", parents=[common], help="CFI of a single-mode Gaussian measurement.")
    _derivative_options(cfi)
    cfi.add_argument("-m", "--mode", choices=[str(m) for m in Mode], default="a2", help="Measured mode. Default is 'a2'.")
    cfi.add_argument(
        "--measurement",
        choices=MEASUREMENTS,
        default="ogm",
        help="Measurement: homodyne Q/P, heterodyne or the optimal Gaussian one. Default is 'ogm'.",
    )

    commands.add_parser("normal-modes", parents=[common], help="Hybrid cavity modes and the Bogoliubov magnon mode.")

    sweep = commands.add_parser("sweep", parents=[common], help="Parameter sweep from a preset or the [sweep] table.")
    _grid_options(sweep)
    _derivative_options(sweep)
    sweep.add_argument(
        "-q",
        "--quantities",
        nargs="+",
        help="Quantities for --axis sweeps. Default is qfi_global.",
    )
    return parser


def parse_args(output_names: list[str] | None = None, argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser(output_names).parse_args(argv)

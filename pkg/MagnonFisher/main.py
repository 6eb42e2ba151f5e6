import logging
import sys
from contextlib import contextmanager
from dataclasses import asdict, replace
from logging.handlers import QueueHandler, QueueListener
from queue import Queue

from MagnonFisher.config import RunConfig, load_config, parse_assignment, split_unit
from MagnonFisher.dynamics import gaussian_state
from MagnonFisher.env_settings import settings
from MagnonFisher.errors import ConfigError, MagnonFisherError
from MagnonFisher.fisher import fisher_report, qfi_subsystem, sensitivity
from MagnonFisher.measure import MeasurementSpec, MeasurementKind, cfi_gaussian, optimal_gaussian
from MagnonFisher.normalmodes import normal_mode_report
from MagnonFisher.outputs import emit, emit_report, registered_outputs
from MagnonFisher.params import SystemParams
from MagnonFisher.parse_args import parse_args
from MagnonFisher.steady import linearization_check, solve_steady, steady_residual
from MagnonFisher.sweep import AxisSpec, SweepSpec, figure_preset, run_sweep

logger = logging.getLogger(f"MagnonFisher.{__name__}")

LOG_FORMAT = "* %(asctime)s [%(levelname)s] %(threadName)s: %(message)s"


@contextmanager
def init_logger(debug: bool = False):
    """
    Route the package logger through a queue so sweep worker threads never block on stderr.
    """
    que = Queue(-1)
    que_handler = QueueHandler(que)
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    listener = QueueListener(que, console_handler, respect_handler_level=True)
    package_logger = logging.getLogger("MagnonFisher")
    package_logger.setLevel(logging.DEBUG if debug else logging.INFO)
    package_logger.addHandler(que_handler)
    package_logger.propagate = False  # Prevent duplicate logs due to propagation
    listener.start()
    package_logger.debug("Logger has started")
    try:
        yield package_logger
    finally:
        package_logger.debug("Logger is shutting down")
        listener.stop()
        package_logger.removeHandler(que_handler)
        package_logger.propagate = True


def resolve_params(args) -> tuple[SystemParams, RunConfig]:
    config = load_config(args.config) if args.config else RunConfig()
    overrides = dict(parse_assignment(text) for text in args.set)
    if overrides:
        logger.debug(f"Overrides: {overrides}")
    return config.params(overrides), config


def _axis(values: list[str], scale: str = "linear") -> AxisSpec:
    raw_name, start, stop, points = values
    name, factor = split_unit(raw_name)
    try:
        return AxisSpec(name, start=float(start) * factor, stop=float(stop) * factor, points=int(points), scale=scale)
    except ValueError as exc:
        raise ConfigError(f"invalid axis {' '.join(values)}: {exc}") from exc


def build_sweep_spec(args, config: RunConfig, stability_only: bool = False) -> SweepSpec:
    if args.preset:
        spec = figure_preset(args.preset)
    elif args.axis:
        spec = SweepSpec(
            axis=_axis(args.axis, args.scale),
            secondary=_axis(args.secondary) if args.secondary else None,
            quantities=tuple(getattr(args, "quantities", None) or ("qfi_global",)),
        )
    elif config.sweep:
        spec = SweepSpec.from_dict(config.sweep)
    else:
        raise ConfigError("a sweep needs --preset, --axis or a [sweep] table in --config")
    changes = {}
    if stability_only:
        changes.update(quantities=("stability",), closed_form_check=args.closed_form_check)
    if hasattr(args, "derivative"):
        changes.update(method=args.derivative, dg_rel=args.dg_rel)
    return replace(spec, **changes)


def command_steady_state(args, params: SystemParams, config: RunConfig) -> None:
    ss = solve_steady(params)
    diagnostics = linearization_check(ss)
    report = {
        "steady_state": ss.as_dict(),
        "residual": steady_residual(params, ss),
        "linearization": asdict(diagnostics),
    }
    emit_report(report, args.format or "json", args.out)


def command_qfi(args, params: SystemParams, config: RunConfig) -> None:
    report = fisher_report(params, method=args.derivative, dg_rel=args.dg_rel, N=args.repetitions)
    emit_report(report.as_dict(), args.format or "json", args.out)


def command_cfi(args, params: SystemParams, config: RunConfig) -> None:
    state = gaussian_state(params)
    sens = sensitivity(params, state, args.derivative, args.dg_rel)
    report = {"mode": args.mode, "measurement": args.measurement, "qfi_mode": qfi_subsystem(state, sens, args.mode)}
    if args.measurement == "ogm":
        optimum = optimal_gaussian(state, sens, args.mode)
        report.update(cfi=optimum.F_ogm, optimum=optimum.as_dict())
    else:
        spec = MeasurementSpec(MeasurementKind(args.measurement))
        report["cfi"] = cfi_gaussian(state, sens, args.mode, spec)
    emit_report(report, args.format or "json", args.out)


def command_normal_modes(args, params: SystemParams, config: RunConfig) -> None:
    emit_report(normal_mode_report(params).as_dict(), args.format or "json", args.out)


def command_sweep(args, params: SystemParams, config: RunConfig, stability_only: bool = False) -> None:
    spec = build_sweep_spec(args, config, stability_only=stability_only)
    result = run_sweep(spec, params, jobs=args.jobs)
    emit(result, args.format or settings.OUTPUT_FORMAT, args.out, config_digest=config.digest or None)


def command_stability_map(args, params: SystemParams, config: RunConfig) -> None:
    command_sweep(args, params, config, stability_only=True)


COMMANDS = {
    "steady-state": command_steady_state,
    "stability-map": command_stability_map,
    "qfi": command_qfi,
    "cfi": command_cfi,
    "normal-modes": command_normal_modes,
    "sweep": command_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = parse_args(registered_outputs.get_names(), argv)
    with init_logger(args.debug or settings.DEBUG):
        try:
            params, config = resolve_params(args)
            COMMANDS[args.command](args, params, config)
        except MagnonFisherError as exc:
            logger.error(f"{exc.reason}: {exc}")
            return 2
        except KeyboardInterrupt:
            logger.info("KeyboardInterrupt. Exit.")
            return 130
    return 0


def entry_point():
    sys.exit(main())


if __name__ == "__main__":
    entry_point()

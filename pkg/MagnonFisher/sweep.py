"""
Parameter sweeps over one or two axes, evaluated by a pool of worker coroutines.

Each grid point runs the full chain: steady state, stability gate, covariance,
sensitivity and the requested information quantities. Points without a unique stable
steady state are recorded as skipped with a reason code, never filled in.
"""

import asyncio
import itertools
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from MagnonFisher.config import split_unit
from MagnonFisher.dynamics import Mode, build_drift, check_stability, compare_closed_form, gaussian_state
from MagnonFisher.errors import ConfigError, MagnonFisherError, UnknownPreset
from MagnonFisher.fisher import DEFAULT_DG_REL, METHODS, qfi_global, qfi_subsystem, sensitivity
from MagnonFisher.measure import MeasurementSpec, cfi_gaussian, cfi_heterodyne, optimal_gaussian
from MagnonFisher.params import SystemParams, two_pi_mhz, two_pi_uhz
from MagnonFisher.steady import linearization_check, solve_steady

logger = logging.getLogger(f"MagnonFisher.{__name__}")

AXES = ("P_l", "T", "gamma_a", "gamma_m", "J", "K", "delta_a", "delta_m", "g")
QUANTITIES = (
    "qfi_global",
    "qfi_a1",
    "qfi_a2",
    "qfi_m",
    "ratios",
    "cfi_hom_q",
    "cfi_hom_p",
    "cfi_het",
    "cfi_ogm",
    "stability",
)
SKIP_REASONS = ("multistable", "no_steady_state", "unstable", "singular", "stencil_unstable", "near_pure")
DIAGNOSTIC_COLUMNS = ("m_abs2", "a2_abs2", "low_photon", "holstein_primakoff")
STABILITY_COLUMNS = ("stable", "max_real_eig", "hurwitz_ok", "marginal")


@dataclass(frozen=True)
class AxisSpec:
    name: str
    start: float | None = None
    stop: float | None = None
    points: int = 0
    scale: str = "linear"
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.name not in AXES:
            raise ConfigError(f"unknown sweep axis {self.name!r}, expected one of {', '.join(AXES)}")
        if self.values is not None:
            if len(self.values) < 1:
                raise ConfigError(f"axis {self.name} has an empty value list")
            return
        if self.start is None or self.stop is None:
            raise ConfigError(f"axis {self.name} needs start and stop, or a value list")
        if self.points < 2:
            raise ConfigError(f"axis {self.name} needs at least 2 points, got {self.points}")
        if not self.start < self.stop:
            raise ConfigError(f"axis {self.name} needs start < stop")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.name} scale must be linear or log, got {self.scale!r}")
        if self.scale == "log" and self.start <= 0:
            raise ConfigError(f"log-scaled axis {self.name} needs positive endpoints")

    def grid(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)

    @classmethod
    def from_dict(cls, data: dict) -> "AxisSpec":
        data = dict(data)
        name = data.pop("axis", None) or data.pop("name", None)
        if name is None:
            raise ConfigError("sweep axis needs a name")
        kwargs = {"name": name}
        for key, value in data.items():
            bare, factor = split_unit(key)
            if bare in ("start", "stop"):
                kwargs[bare] = float(value) * factor
            elif bare == "values":
                kwargs["values"] = tuple(float(v) * factor for v in value)
            elif bare in ("points", "scale"):
                kwargs[bare] = value
            else:
                raise ConfigError(f"unknown key {key!r} in sweep axis {name}")
        return cls(**kwargs)

    def as_dict(self) -> dict:
        if self.values is not None:
            return {"axis": self.name, "values": list(self.values)}
        return {"axis": self.name, "start": self.start, "stop": self.stop, "points": self.points, "scale": self.scale}


@dataclass(frozen=True)
class SweepSpec:
    axis: AxisSpec
    quantities: tuple[str, ...]
    secondary: AxisSpec | None = None
    mode: Mode = Mode.A2
    method: str = "analytic"
    dg_rel: float = DEFAULT_DG_REL
    closed_form_check: bool = False
    name: str | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown:
            raise ConfigError(f"unknown quantities: {', '.join(sorted(unknown))}")
        if not self.quantities:
            raise ConfigError("a sweep needs at least one quantity")
        if self.secondary is not None and self.secondary.name == self.axis.name:
            raise ConfigError("primary and secondary axes must differ")
        if self.method not in METHODS:
            raise ConfigError(f"unknown derivative method {self.method!r}")
        object.__setattr__(self, "quantities", tuple(q for q in QUANTITIES if q in self.quantities))
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def stability_only(self) -> bool:
        return self.quantities == ("stability",)

    @property
    def axis_names(self) -> tuple[str, ...]:
        return (self.axis.name,) if self.secondary is None else (self.axis.name, self.secondary.name)

    def points(self) -> list[tuple[float, ...]]:
        grids = [self.axis.grid()] + ([self.secondary.grid()] if self.secondary else [])
        return [tuple(float(v) for v in point) for point in itertools.product(*grids)]

    def columns(self) -> tuple[str, ...]:
        columns = list(self.axis_names) + list(STABILITY_COLUMNS)
        for quantity in self.quantities:
            match quantity:
                case "ratios":
                    columns.extend(f"xi_{mode}" for mode in Mode)
                case "stability":
                    if self.closed_form_check:
                        columns.append("closed_form_ok")
                case _:
                    columns.append(quantity)
        columns.extend(DIAGNOSTIC_COLUMNS)
        return tuple(columns)

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "SweepSpec":
        data = dict(data)
        try:
            primary = {k: v for k, v in data.items() if k not in ("secondary", "quantities", "mode", "method", "dg_rel")}
            return cls(
                axis=AxisSpec.from_dict(primary),
                secondary=AxisSpec.from_dict(data["secondary"]) if "secondary" in data else None,
                quantities=tuple(data.get("quantities", ("qfi_global",))),
                mode=Mode(data.get("mode", "a2")),
                method=data.get("method", "analytic"),
                dg_rel=float(data.get("dg_rel", DEFAULT_DG_REL)),
                **overrides,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed sweep table: {exc}") from exc

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "axis": self.axis.as_dict(),
            "secondary": self.secondary.as_dict() if self.secondary else None,
            "quantities": list(self.quantities),
            "mode": str(self.mode),
            "method": self.method,
            "dg_rel": self.dg_rel,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class SkipRecord:
    index: int
    point: dict[str, float]
    reason: str
    message: str


@dataclass
class SweepResult:
    spec: SweepSpec
    columns: tuple[str, ...]
    rows: list[dict] = field(default_factory=list)
    skipped: list[SkipRecord] = field(default_factory=list)
    base: SystemParams | None = None

    @property
    def grid_size(self) -> int:
        return len(self.rows) + len(self.skipped)


def skip_reason(exc: MagnonFisherError) -> str:
    return exc.reason if exc.reason in SKIP_REASONS else "error"


def _stability_record(params: SystemParams, spec: SweepSpec) -> dict:
    ss = solve_steady(params)
    A = build_drift(params, ss)
    record = check_stability(A).as_dict()
    if spec.closed_form_check:
        record["closed_form_ok"] = compare_closed_form(params, ss, A).agree if params.symmetric_cavities else None
    diagnostics = linearization_check(ss)
    record.update(
        m_abs2=ss.m_abs2,
        a2_abs2=diagnostics.a2_abs2,
        low_photon=diagnostics.low_photon,
        holstein_primakoff=diagnostics.holstein_primakoff,
    )
    return record


def evaluate_point(params: SystemParams, spec: SweepSpec) -> dict:
    """All quantities of ``spec`` at one parameter point, keyed by column name."""
    if spec.stability_only:
        return _stability_record(params, spec)

    state = gaussian_state(params)
    diagnostics = linearization_check(state.steady)
    record = state.verdict.as_dict()
    record.update(
        m_abs2=state.steady.m_abs2,
        a2_abs2=diagnostics.a2_abs2,
        low_photon=diagnostics.low_photon,
        holstein_primakoff=diagnostics.holstein_primakoff,
    )
    wanted = set(spec.quantities)
    sens = sensitivity(params, state, spec.method, spec.dg_rel)
    needs_global = wanted & {"qfi_global", "ratios"}
    total = qfi_global(state, sens) if needs_global else None
    sub = {}
    for mode in Mode:
        if f"qfi_{mode}" in wanted or "ratios" in wanted:
            sub[mode] = qfi_subsystem(state, sens, mode)
            if f"qfi_{mode}" in wanted:
                record[f"qfi_{mode}"] = sub[mode]
    if "qfi_global" in wanted:
        record["qfi_global"] = total
    if "ratios" in wanted:
        for mode in Mode:
            record[f"xi_{mode}"] = sub[mode] / total if total > 0 else math.nan
    if "cfi_hom_q" in wanted:
        record["cfi_hom_q"] = cfi_gaussian(state, sens, spec.mode, MeasurementSpec.homodyne_q())
    if "cfi_hom_p" in wanted:
        record["cfi_hom_p"] = cfi_gaussian(state, sens, spec.mode, MeasurementSpec.homodyne_p())
    if "cfi_het" in wanted:
        record["cfi_het"] = cfi_heterodyne(state, sens, spec.mode)
    if "cfi_ogm" in wanted:
        record["cfi_ogm"] = optimal_gaussian(state, sens, spec.mode).F_ogm
    return record


def _evaluate(index: int, point: tuple[float, ...], spec: SweepSpec, base: SystemParams) -> dict | SkipRecord:
    named = dict(zip(spec.axis_names, point))
    try:
        params = base.with_overrides(**named)
        record = evaluate_point(params, spec)
    except MagnonFisherError as exc:
        logger.debug(f"point {index} {named} skipped: {exc.reason}: {exc}")
        return SkipRecord(index=index, point=named, reason=skip_reason(exc), message=str(exc))
    except np.linalg.LinAlgError as exc:
        logger.warning(f"point {index} {named} skipped: linear algebra failure: {exc}")
        return SkipRecord(index=index, point=named, reason="singular", message=str(exc))
    logger.debug(f"point {index} {named} done")
    return {**named, **record}


async def run_sweep_async(spec: SweepSpec, base: SystemParams, jobs: int = 1) -> SweepResult:
    """
    Evaluate the sweep grid with ``jobs`` worker coroutines, each point in a worker thread.

    Results are ordered by grid index, so the output does not depend on scheduling.
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be at least 1, got {jobs}")
    points = spec.points()
    logger.info(f"Sweep {spec.name or spec.axis_names} started: {len(points)} points, {jobs} worker(s)")
    queue: asyncio.Queue = asyncio.Queue()
    for item in enumerate(points):
        queue.put_nowait(item)
    collected: dict[int, dict | SkipRecord] = {}

    async def worker():
        while True:
            try:
                index, point = queue.get_nowait()
            except asyncio.QueueEmpty:
                break
            collected[index] = await asyncio.to_thread(_evaluate, index, point, spec, base)
            queue.task_done()

    await asyncio.gather(*(worker() for _ in range(min(jobs, max(len(points), 1)))))

    result = SweepResult(spec=spec, columns=spec.columns(), base=base)
    for index in sorted(collected):
        outcome = collected[index]
        if isinstance(outcome, SkipRecord):
            result.skipped.append(outcome)
        else:
            result.rows.append(outcome)
    logger.info(f"Sweep finished: {len(result.rows)} rows, {len(result.skipped)} skipped")
    return result


def run_sweep(spec: SweepSpec, base: SystemParams, jobs: int = 1) -> SweepResult:
    return asyncio.run(run_sweep_async(spec, base, jobs))


APPROXIMATE = "axis extent read off the published plot; approximate"


def _mhz(start: float, stop: float, points: int, name: str) -> AxisSpec:
    return AxisSpec(name, start=two_pi_mhz(start), stop=two_pi_mhz(stop), points=points)


def _presets() -> dict[str, SweepSpec]:
    qfis = ("qfi_global", "qfi_a1", "qfi_a2", "qfi_m")
    cfis = ("qfi_a2", "cfi_hom_q", "cfi_hom_p", "cfi_het", "cfi_ogm")
    power = AxisSpec("P_l", start=1e-3, stop=1.0, points=31, scale="log")
    tunneling = _mhz(0.0, 60.0, 31, "J")
    kerr = AxisSpec("K", start=0.0, stop=two_pi_uhz(10.0), points=31)
    temperature = AxisSpec("T", start=10e-3, stop=200e-3, points=20)
    return {
        "fig2": SweepSpec(
            axis=power,
            secondary=AxisSpec("T", values=(10e-3, 100e-3, 200e-3)),
            quantities=qfis,
        ),
        "fig3": SweepSpec(
            axis=AxisSpec("gamma_a", start=two_pi_mhz(0.5), stop=two_pi_mhz(300.0), points=24, scale="log"),
            secondary=_mhz(10.0, 80.0, 15, "gamma_m"),
            quantities=("qfi_global",),
            notes=(f"gamma_m: {APPROXIMATE}", "gamma_a: widened so the grid brackets the optimum"),
        ),
        "fig4": SweepSpec(
            axis=AxisSpec("K", start=0.0, stop=two_pi_uhz(10.0), points=21),
            secondary=_mhz(0.0, 60.0, 21, "J"),
            quantities=qfis,
            notes=(f"K, J: {APPROXIMATE}",),
        ),
        "fig5a": SweepSpec(
            axis=_mhz(-150.0, 150.0, 151, "delta_a"),
            quantities=qfis,
            notes=(f"delta_a: {APPROXIMATE}",),
        ),
        "fig5b": SweepSpec(
            axis=_mhz(-150.0, 150.0, 151, "delta_m"),
            quantities=qfis,
            notes=(f"delta_m: {APPROXIMATE}",),
        ),
        "fig6a": SweepSpec(axis=tunneling, quantities=("ratios",), notes=(f"J: {APPROXIMATE}",)),
        "fig6b": SweepSpec(axis=kerr, quantities=("ratios",), notes=(f"K: {APPROXIMATE}",)),
        "fig7a": SweepSpec(axis=power, quantities=cfis),
        "fig7b": SweepSpec(axis=tunneling, quantities=cfis, notes=(f"J: {APPROXIMATE}",)),
        "fig7c": SweepSpec(axis=kerr, quantities=cfis, notes=(f"K: {APPROXIMATE}",)),
        "fig7d": SweepSpec(axis=temperature, quantities=cfis, notes=(f"T: {APPROXIMATE}",)),
    }


def preset_names() -> list[str]:
    return list(_presets())


def figure_preset(name: str) -> SweepSpec:
    """Sweep reproducing one published figure, all other parameters at baseline."""
    presets = _presets()
    if name not in presets:
        raise UnknownPreset(f"unknown preset {name!r}, expected one of {', '.join(presets)}")
    return replace(presets[name], name=name)

"""
TOML configuration and ``KEY=VALUE`` overrides.

Numeric keys may carry a unit suffix, e.g. ``gamma_m_2pi_MHz = 40`` or ``T_mK = 10``,
converted to SI units with rates in rad/s on ingest.
"""

import hashlib
import logging
import math
import tomllib
from dataclasses import dataclass, field, fields
from pathlib import Path

from MagnonFisher.errors import ConfigError, DomainError
from MagnonFisher.params import MaterialParams, SystemParams, sphere_volume

logger = logging.getLogger(f"MagnonFisher.{__name__}")

TWO_PI = 2.0 * math.pi

UNIT_SUFFIXES: dict[str, float] = {
    "_2pi_GHz": TWO_PI * 1e9,
    "_2pi_MHz": TWO_PI * 1e6,
    "_2pi_kHz": TWO_PI * 1e3,
    "_2pi_Hz": TWO_PI,
    "_2pi_uHz": TWO_PI * 1e-6,
    "_GHz": 1e9,
    "_MHz": 1e6,
    "_mK": 1e-3,
    "_mW": 1e-3,
    "_um": 1e-6,
}

SHORTHAND_KEYS = ("gamma_a", "delta_a", "gamma_a2_0")
SYSTEM_KEYS = frozenset({f.name for f in fields(SystemParams)} | set(SHORTHAND_KEYS))
MATERIAL_KEYS = frozenset({f.name for f in fields(MaterialParams)} | {"diameter"})
MATERIAL_DERIVED_KEYS = ("delta_m", "K", "omega_m")


def split_unit(key: str) -> tuple[str, float]:
    """Strip a unit suffix from ``key`` and return the bare name with its SI factor."""
    for suffix in sorted(UNIT_SUFFIXES, key=len, reverse=True):
        if key.endswith(suffix) and len(key) > len(suffix):
            return key[: -len(suffix)], UNIT_SUFFIXES[suffix]
    return key, 1.0


def _number(key: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"value of {key!r} must be a number, got {value!r}")
    return float(value)


def convert_table(table: dict, allowed: frozenset[str], section: str) -> dict[str, float]:
    converted = {}
    for key, value in table.items():
        name, factor = split_unit(key)
        if name not in allowed:
            raise ConfigError(f"unknown key {key!r} in [{section}]")
        if name in converted:
            raise ConfigError(f"{name!r} is given more than once in [{section}]")
        converted[name] = _number(key, value) * factor
    return converted


def parse_assignment(text: str) -> tuple[str, float]:
    """Parse one ``KEY=VALUE`` override, with the same key grammar as the [system] table."""
    if "=" not in text:
        raise ConfigError(f"invalid override {text!r}, expected KEY=VALUE")
    key, raw = (part.strip() for part in text.split("=", 1))
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"value of {key!r} must be a number, got {raw!r}") from exc
    converted = convert_table({key: value}, SYSTEM_KEYS, "--set")
    return next(iter(converted.items()))


def resolve_linewidth(system: dict[str, float]) -> dict[str, float]:
    """Replace ``gamma_a2_0`` by the total ``gamma_a2`` = γ0 + γ_ex."""
    system = dict(system)
    if "gamma_a2_0" in system:
        intrinsic = system.pop("gamma_a2_0")
        if "gamma_a2_ex" not in system:
            raise ConfigError("gamma_a2_0 needs gamma_a2_ex to define the total cavity-2 linewidth")
        if "gamma_a2" in system:
            raise ConfigError("give either gamma_a2 or gamma_a2_0 with gamma_a2_ex, not both")
        system["gamma_a2"] = intrinsic + system["gamma_a2_ex"]
    return system


def build_material(table: dict[str, float]) -> MaterialParams:
    """YIG constants with the given entries overridden; ``diameter`` sets V_m."""
    table = dict(table)
    diameter = table.pop("diameter", 250e-6)
    base = MaterialParams.yig(diameter=diameter)
    if "V_m" not in table:
        table["V_m"] = sphere_volume(diameter)
    values = {f.name: table.get(f.name, getattr(base, f.name)) for f in fields(MaterialParams)}
    return MaterialParams(**values)


def build_params(system: dict[str, float] | None = None, material: dict[str, float] | None = None) -> SystemParams:
    """
    Baseline parameters with ``system`` applied; with ``material`` the magnon frequency,
    Kerr coefficient and (unless given) the coupling follow from the material constants.
    """
    system = resolve_linewidth(system or {})
    try:
        if material is None:
            return SystemParams.baseline(**system)
        mat = build_material(material)
        derived = sorted(set(system) & set(MATERIAL_DERIVED_KEYS))
        if derived:
            raise ConfigError(f"{', '.join(derived)} cannot be set together with a [material] table")
        base = SystemParams.baseline().with_overrides(**{k: v for k, v in system.items() if k != "g"})
        params = SystemParams.from_material(
            mat,
            omega_l=base.omega_l,
            delta_a1=base.delta_a1,
            delta_a2=base.delta_a2,
            gamma_a1=base.gamma_a1,
            gamma_a2=base.gamma_a2,
            gamma_m=base.gamma_m,
            J=base.J,
            P_l=base.P_l,
            T=base.T,
            g=system.get("g"),
        )
        if base.gamma_a2_ex is not None:
            params = params.with_overrides(gamma_a2_ex=base.gamma_a2_ex)
        return params
    except DomainError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration file."""

    system: dict[str, float] = field(default_factory=dict)
    material: dict[str, float] | None = None
    sweep: dict | None = None
    digest: str = ""
    source: str | None = None

    def params(self, overrides: dict[str, float] | None = None) -> SystemParams:
        system = {**self.system, **(overrides or {})}
        return build_params(system, self.material)


def parse_config(text: str, source: str | None = None) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {source or 'configuration'}: {exc}") from exc
    unknown = set(data) - {"system", "material", "sweep"}
    if unknown:
        raise ConfigError(f"unknown table(s): {', '.join(sorted(unknown))}")
    system = convert_table(data.get("system", {}), SYSTEM_KEYS, "system")
    material = convert_table(data["material"], MATERIAL_KEYS, "material") if "material" in data else None
    return RunConfig(
        system=system,
        material=material,
        sweep=data.get("sweep"),
        digest=hashlib.sha256(text.encode()).hexdigest(),
        source=source,
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    logger.debug(f"Loaded configuration {path}")
    return parse_config(text, source=str(path))

import csv
import hashlib
import io
import json
import logging
import math
import sys
from abc import ABC, abstractmethod
from pathlib import Path
from typing import TypeVar

from MagnonFisher import __version__
from MagnonFisher.errors import ConfigError, IoError
from MagnonFisher.params import GAMMA_E, HBAR, K_B, MU_0
from MagnonFisher.sweep import SweepResult

logger = logging.getLogger(f"MagnonFisher.{__name__}")

FLOAT_FORMAT = "%.17g"


class OutputAbstract(ABC):
    """
    Abstract base class for result writers.
    """

    name: str = ""

    def __str__(self) -> str:
        return self.name

    @abstractmethod
    def render_sweep(self, result: SweepResult, metadata: dict) -> str:
        """
        Render a sweep result.

        Args:
            result (SweepResult): Rows and skipped points of the sweep.
            metadata (dict): Run metadata, used by formats that can carry it.

        Returns:
            str: The full file content.
        """
        ...

    @abstractmethod
    def render_report(self, report: dict) -> str:
        """
        Render a single-point report.
        """
        ...


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FLOAT_FORMAT % value
    return str(value)


def parse_value(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    return float(text)


def write_csv_text(columns: tuple[str, ...] | list[str], rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(column)) for column in columns])
    return buffer.getvalue()


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class CsvOutput(OutputAbstract):
    """One header row and one row per computed point, 17 significant digits."""

    name = "csv"

    def render_sweep(self, result: SweepResult, metadata: dict) -> str:
        return write_csv_text(result.columns, result.rows)

    def render_report(self, report: dict) -> str:
        flat = {}
        for key, value in report.items():
            if isinstance(value, dict):
                flat.update({f"{key}.{inner}": v for inner, v in value.items()})
            else:
                flat[key] = value
        return write_csv_text(list(flat), [flat])


class JsonOutput(OutputAbstract):
    """Records, skipped points and run metadata."""

    name = "json"

    def render_sweep(self, result: SweepResult, metadata: dict) -> str:
        document = {
            "metadata": metadata,
            "columns": list(result.columns),
            "records": [{column: row.get(column) for column in result.columns} for row in result.rows],
            "skipped": [
                {"index": skip.index, "point": skip.point, "reason": skip.reason, "message": skip.message}
                for skip in result.skipped
            ],
        }
        return json.dumps(_jsonable(document), indent=2) + "\n"

    def render_report(self, report: dict) -> str:
        return json.dumps(_jsonable(report), indent=2) + "\n"


T = TypeVar("T", bound=OutputAbstract)


class ManagerOutputs:
    """Registry of output formats, looked up by name."""

    def __init__(self, outputs: list[T] | None = None):
        self.outputs = outputs or []

    def register(self, output: T):
        self.outputs.append(output)

    def unregister(self, name: str):
        self.outputs = [o for o in self.outputs if str(o) != name]

    def get(self, name: str) -> T:
        for output in self.outputs:
            if str(output) == name:
                return output
        raise ConfigError(f"unknown output format {name!r}, expected one of {', '.join(self.get_names())}")

    def get_names(self) -> list[str]:
        return [str(o) for o in self.outputs]


registered_outputs = ManagerOutputs([CsvOutput(), JsonOutput()])


def constants_metadata() -> dict:
    return {"hbar": HBAR, "k_B": K_B, "mu_0": MU_0, "gamma_e": GAMMA_E}


def run_metadata(result: SweepResult, config_digest: str | None = None) -> dict:
    """
    Metadata of a sweep. Without a configuration file the digest covers the sweep and base
    parameters, so identical runs always produce identical metadata.
    """
    base = result.base.as_dict() if result.base is not None else None
    if not config_digest:
        canonical = json.dumps(_jsonable({"spec": result.spec.as_dict(), "base": base}), sort_keys=True)
        config_digest = hashlib.sha256(canonical.encode()).hexdigest()
    return {
        "tool": "magnon-fisher",
        "version": __version__,
        "config_sha256": config_digest,
        "constants": constants_metadata(),
        "sweep": result.spec.as_dict(),
        "base_params": base,
        "rows": len(result.rows),
        "skipped": len(result.skipped),
        "approximate_ranges": list(result.spec.notes),
    }


def write_text(text: str, path: str | Path | None) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"Wrote {path}")


def emit(result: SweepResult, format: str = "csv", path: str | Path | None = None, config_digest: str | None = None) -> None:
    """Write a sweep result as CSV or JSON to ``path`` (stdout when omitted)."""
    output = registered_outputs.get(format)
    write_text(output.render_sweep(result, run_metadata(result, config_digest)), path)


def emit_report(report: dict, format: str = "json", path: str | Path | None = None) -> None:
    """Write a single-point report."""
    output = registered_outputs.get(format)
    write_text(output.render_report(report), path)


def read_csv(path: str | Path) -> tuple[list[str], list[dict]]:
    """Re-ingest an emitted sweep CSV as (columns, rows)."""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            columns = next(reader, [])
            rows = [dict(zip(columns, (parse_value(cell) for cell in line))) for line in reader]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return columns, rows

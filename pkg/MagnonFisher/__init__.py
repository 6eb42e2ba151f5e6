import tomllib
from importlib import metadata
from pathlib import Path

DISTRIBUTION = "magnon-fisher"
UNKNOWN_VERSION = "0.0.0+unknown"


def get_version(pyproject: str | Path | None = None) -> str:
    """
    Version of the magnon-fisher distribution.

    An explicit ``pyproject`` path is read directly. Otherwise the installed package
    metadata wins, and a source checkout falls back to the neighbouring pyproject.toml.
    """
    if pyproject is None:
        try:
            return metadata.version(DISTRIBUTION)
        except metadata.PackageNotFoundError:
            pyproject = Path(__file__).resolve().parent.parent / "pyproject.toml"
    try:
        with open(pyproject, "rb") as f:
            data = tomllib.load(f)
    except (FileNotFoundError, tomllib.TOMLDecodeError):
        return UNKNOWN_VERSION
    return data.get("tool", {}).get("poetry", {}).get("version", UNKNOWN_VERSION)


__version__ = get_version()

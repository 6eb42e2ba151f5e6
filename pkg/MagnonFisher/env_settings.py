import logging
import os
import sys
from pathlib import Path
from threading import Lock

from dotenv import find_dotenv, load_dotenv

logger = logging.getLogger(f"MagnonFisher.{__name__}")

OUTPUT_FORMATS = ("csv", "json")
DERIVATIVES = ("analytic", "stencil")


class Settings:
    _instance = None
    _lock = Lock()  # For thread-safe singleton

    def __new__(cls, *args, **kwargs):
        with cls._lock:
            if not cls._instance:
                cls._instance = super().__new__(cls)
                cls._instance._initialize()
        return cls._instance

    def _find_env(self) -> bool:
        loaded_dotenv = False
        dotenv = find_dotenv(usecwd=True)
        if dotenv:
            loaded_dotenv = load_dotenv(dotenv)

        if not loaded_dotenv:
            exe_dir = Path(sys.executable).resolve().parent
            loaded_dotenv = load_dotenv(exe_dir.joinpath(".env"))

        if loaded_dotenv:
            logger.debug("Loaded .env file")
        return loaded_dotenv

    @staticmethod
    def _positive(name: str, default, cast):
        raw = os.getenv(name)
        if raw is None:
            return default
        try:
            value = cast(raw.strip())
        except ValueError:
            logger.warning(f"{name}={raw!r} is not a valid number, using {default}")
            return default
        if not value > 0:
            logger.warning(f"{name}={raw!r} must be positive, using {default}")
            return default
        return value

    @staticmethod
    def _choice(name: str, choices: tuple[str, ...]) -> str:
        value = os.getenv(name, choices[0]).strip().lower()
        return value if value in choices else choices[0]

    def _initialize(self):
        self._find_env()
        self.reload()

    def reload(self):
        """Re-read the environment, for callers that changed it after import."""
        self.DEBUG = os.getenv("DEBUG", "False").strip().lower() == "true"
        self.JOBS = self._positive("MAGNON_FISHER_JOBS", 1, int)
        self.OUTPUT_FORMAT = self._choice("MAGNON_FISHER_FORMAT", OUTPUT_FORMATS)
        self.DERIVATIVE = self._choice("MAGNON_FISHER_DERIVATIVE", DERIVATIVES)
        self.DG_REL = self._positive("MAGNON_FISHER_DG_REL", 1e-6, float)
        self.BASE_PATH = Path(__file__).parent
        self.APP_NAME = "magnon-fisher"


settings = Settings()

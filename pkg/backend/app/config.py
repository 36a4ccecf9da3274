import logging
import os
from pathlib import Path
from typing import Optional

import dotenv
from pydantic import BaseModel, ConfigDict

# Load environment variables from .env file in root directory
root_dir = Path(__file__).parent.parent.parent
dotenv.load_dotenv(dotenv_path=root_dir / ".env")

HERE = Path(__file__).resolve().parent
DEFAULT_DB_PATH = HERE.parent / "runs.db"

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    database_url: str = f"sqlite:///{DEFAULT_DB_PATH}"
    n_jobs: int = 1
    psd_tol: float = 1e-8
    log_level: str = "INFO"
    backend_port: int = 8000
    front_end_url: str = "http://localhost:3000"


def _get_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"Invalid {name} value: {raw}") from exc


def _get_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ValueError(f"Invalid {name} value: {raw}") from exc


def get_settings() -> Settings:
    """Read settings from the environment; called on demand so tests can monkeypatch."""
    defaults = Settings()
    return Settings(
        database_url=os.getenv("KERNELS_DATABASE_URL") or defaults.database_url,
        n_jobs=_get_int("KERNELS_N_JOBS", defaults.n_jobs),
        psd_tol=_get_float("KERNELS_PSD_TOL", defaults.psd_tol),
        log_level=(os.getenv("KERNELS_LOG_LEVEL") or defaults.log_level).upper(),
        backend_port=_get_int("BACKEND_PORT", defaults.backend_port),
        front_end_url=os.getenv("FRONT_END_URL") or defaults.front_end_url,
    )


def configure_logging(level: Optional[str] = None) -> None:
    level_name = (level or get_settings().log_level).upper()
    numeric = logging.getLevelName(level_name)
    if not isinstance(numeric, int):
        raise ValueError(f"Invalid KERNELS_LOG_LEVEL value: {level_name}")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)
    logging.getLogger().setLevel(numeric)

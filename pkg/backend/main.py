"""Entry point for the FastAPI service; ``uvicorn main:app`` serves ``app.main.app``."""

from __future__ import annotations

import uvicorn

from app.config import get_settings
from app.main import app

__all__ = ["app"]


def _get_port() -> int:
    return get_settings().backend_port


if __name__ == "__main__":  # pragma: no cover - manual execution path
    uvicorn.run("app.main:app", host="0.0.0.0", port=_get_port(), reload=True)

from fastapi import HTTPException

from app.errors import GraphKernelError, is_numeric_error


def to_http(exc: Exception) -> HTTPException:
    """422 for numerical failures, 400 for everything the caller sent wrong."""
    if isinstance(exc, GraphKernelError) and is_numeric_error(exc):
        return HTTPException(status_code=422, detail=str(exc))
    return HTTPException(status_code=400, detail=str(exc))

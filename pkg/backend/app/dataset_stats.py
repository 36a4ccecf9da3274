from fastapi import APIRouter

from app import schemas
from app.api_errors import to_http
from app.datasets import dataset_statistics, parse_dataset
from app.errors import GraphKernelError

router = APIRouter(tags=["datasets"])


@router.post("/datasets/inspect", response_model=schemas.DatasetStats)
def inspect_dataset(request: schemas.DatasetInspectRequest):
    try:
        return dataset_statistics(parse_dataset(request.path))
    except GraphKernelError as exc:
        raise to_http(exc) from exc

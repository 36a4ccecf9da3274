from typing import List

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from app import crud, schemas
from app.api_errors import to_http
from app.config import get_settings
from app.database import get_db
from app.datasets import parse_dataset
from app.errors import GraphKernelError
from app.experiments import run_gram

router = APIRouter(tags=["gram-runs"])


@router.get("/gram_runs", response_model=List[schemas.GramRun])
def list_gram_runs(db: Session = Depends(get_db)):
    return [schemas.GramRun.from_row(row) for row in crud.get_gram_runs(db)]


@router.post("/gram_runs", response_model=schemas.GramRun)
def create_gram_run(run: schemas.GramRunCreate, db: Session = Depends(get_db)):
    settings = get_settings()
    try:
        dataset = parse_dataset(run.dataset_path)
        gram, psd = run_gram(dataset, run.kernel, scale=run.scale, n_jobs=settings.n_jobs, psd_tol=settings.psd_tol)
    except (GraphKernelError, ValueError) as exc:
        raise to_http(exc) from exc
    row = crud.create_gram_run(db, run.dataset_path, gram, psd)
    return schemas.GramRun.from_row(row, include_matrix=run.include_matrix)


@router.get("/gram_runs/{run_id}", response_model=schemas.GramRun)
def get_gram_run(run_id: int, include_matrix: bool = False, db: Session = Depends(get_db)):
    row = crud.get_gram_run(db, run_id)
    if not row:
        raise HTTPException(status_code=404, detail="Gram run not found")
    return schemas.GramRun.from_row(row, include_matrix=include_matrix)


@router.delete("/gram_runs/{run_id}")
def delete_gram_run(run_id: int, db: Session = Depends(get_db)):
    if not crud.delete_gram_run(db, run_id):
        raise HTTPException(status_code=404, detail="Gram run not found")
    return {"ok": True}

from typing import List

from fastapi import APIRouter, Depends, HTTPException
from sqlalchemy.orm import Session

from app import crud, schemas
from app.api_errors import to_http
from app.config import get_settings
from app.database import get_db
from app.datasets import parse_dataset
from app.errors import GraphKernelError
from app.experiments import run_cv

router = APIRouter(tags=["cv-runs"])


@router.get("/cv_runs", response_model=List[schemas.CvRun])
def list_cv_runs(db: Session = Depends(get_db)):
    return [schemas.CvRun.from_row(row) for row in crud.get_cv_runs(db)]


@router.post("/cv_runs", response_model=schemas.CvRun)
def create_cv_run(run: schemas.CvRunCreate, db: Session = Depends(get_db)):
    try:
        dataset = parse_dataset(run.dataset_path)
        report = run_cv(
            dataset,
            run.kernel,
            folds=run.folds,
            C_grid=run.C_grid,
            param_grid=run.param_grid,
            seed=run.seed,
            repeats=run.repeats,
            scale=run.scale,
            scheme=run.scheme,
            n_jobs=get_settings().n_jobs,
        )
    except (GraphKernelError, ValueError) as exc:
        raise to_http(exc) from exc
    row = crud.create_cv_run(
        db, run.dataset_path, run.kernel.record(), report, folds=run.folds, seed=run.seed, repeats=run.repeats
    )
    return schemas.CvRun.from_row(row)


@router.get("/cv_runs/{run_id}", response_model=schemas.CvRun)
def get_cv_run(run_id: int, db: Session = Depends(get_db)):
    row = crud.get_cv_run(db, run_id)
    if not row:
        raise HTTPException(status_code=404, detail="CV run not found")
    return schemas.CvRun.from_row(row)


@router.delete("/cv_runs/{run_id}")
def delete_cv_run(run_id: int, db: Session = Depends(get_db)):
    if not crud.delete_cv_run(db, run_id):
        raise HTTPException(status_code=404, detail="CV run not found")
    return {"ok": True}

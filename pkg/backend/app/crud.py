import json
from typing import List, Optional, Union

from sqlalchemy.orm import Session

from app import models
from app.cross_validation import CvReport, RepeatedCvReport
from app.gram import GramMatrix, PsdReport


def get_gram_runs(db: Session) -> List[models.GramRun]:
    return db.query(models.GramRun).order_by(models.GramRun.id).all()


def get_gram_run(db: Session, run_id: int) -> Optional[models.GramRun]:
    return db.query(models.GramRun).filter(models.GramRun.id == run_id).first()


def create_gram_run(db: Session, dataset_path: str, gram: GramMatrix, psd: PsdReport) -> models.GramRun:
    db_run = models.GramRun(
        dataset_path=dataset_path,
        kernel=gram.kernel_descriptor["kernel"],
        descriptor=json.dumps(gram.kernel_descriptor, sort_keys=True),
        graph_ids=json.dumps(list(gram.graph_ids)),
        matrix=json.dumps(gram.values.tolist()),
        graph_count=gram.size,
        scaled=gram.scaling is not None,
        psd_passed=psd.passed,
        min_eigenvalue=psd.min_eigenvalue,
    )
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    return db_run


def delete_gram_run(db: Session, run_id: int) -> bool:
    db_run = get_gram_run(db, run_id)
    if not db_run:
        return False
    db.delete(db_run)
    db.commit()
    return True


def get_cv_runs(db: Session) -> List[models.CvRun]:
    return db.query(models.CvRun).order_by(models.CvRun.id).all()


def get_cv_run(db: Session, run_id: int) -> Optional[models.CvRun]:
    return db.query(models.CvRun).filter(models.CvRun.id == run_id).first()


def create_cv_run(
    db: Session,
    dataset_path: str,
    descriptor: dict,
    report: Union[CvReport, RepeatedCvReport],
    folds: int,
    seed: int,
    repeats: int,
) -> models.CvRun:
    db_run = models.CvRun(
        dataset_path=dataset_path,
        kernel=descriptor["kernel"],
        descriptor=json.dumps(descriptor, sort_keys=True),
        folds=folds,
        seed=seed,
        repeats=repeats,
        mean_error=report.mean_error,
        report=report.model_dump_json(),
    )
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    return db_run


def delete_cv_run(db: Session, run_id: int) -> bool:
    db_run = get_cv_run(db, run_id)
    if not db_run:
        return False
    db.delete(db_run)
    db.commit()
    return True

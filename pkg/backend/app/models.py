from datetime import datetime

from sqlalchemy import Boolean, Column, DateTime, Float, Integer, String, Text

from app.database import Base


class GramRun(Base):
    __tablename__ = "gram_runs"
    id = Column(Integer, primary_key=True, index=True)
    dataset_path = Column(String, nullable=False)
    kernel = Column(String, nullable=False, index=True)
    # JSON text: full kernel descriptor, graph ids, matrix rows
    descriptor = Column(Text, nullable=False)
    graph_ids = Column(Text, nullable=False)
    matrix = Column(Text, nullable=False)
    graph_count = Column(Integer, nullable=False)
    scaled = Column(Boolean, default=False)
    psd_passed = Column(Boolean, nullable=False)
    min_eigenvalue = Column(Float, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)


class CvRun(Base):
    __tablename__ = "cv_runs"
    id = Column(Integer, primary_key=True, index=True)
    dataset_path = Column(String, nullable=False)
    kernel = Column(String, nullable=False, index=True)
    descriptor = Column(Text, nullable=False)
    folds = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    repeats = Column(Integer, default=1)
    mean_error = Column(Float, nullable=False)
    report = Column(Text, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

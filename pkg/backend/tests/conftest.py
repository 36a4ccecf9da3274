"""Pytest configuration and fixtures for backend tests using SQLAlchemy."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient
from sqlalchemy import create_engine
from sqlalchemy.orm import Session, sessionmaker
from sqlalchemy.pool import StaticPool

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

# keep the import-time create_all away from the on-disk database
os.environ.setdefault("KERNELS_DATABASE_URL", "sqlite://")

from app.main import app
from app.database import Base, get_db
from app.graphs import LabeledGraph

from tests import graph_factory

FIXTURES = Path(__file__).resolve().parent / "fixtures"
TEST_DATABASE_URL = "sqlite://"

engine = create_engine(
    TEST_DATABASE_URL,
    connect_args={"check_same_thread": False},
    poolclass=StaticPool,
)
TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


@pytest.fixture(scope="function")
def db_session() -> Session:
    Base.metadata.create_all(bind=engine)
    session = TestingSessionLocal()
    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(bind=engine)


@pytest.fixture(scope="function")
def client(db_session: Session):
    def override_get_db():
        yield db_session

    app.dependency_overrides[get_db] = override_get_db

    with TestClient(app) as test_client:
        yield test_client

    app.dependency_overrides.clear()


@pytest.fixture
def two_dataset_dir() -> Path:
    """Two graphs: a labeled edge (class 1) and an isolated vertex (class -1)."""
    return FIXTURES / "TWO"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def corpus() -> list[LabeledGraph]:
    return graph_factory.small_corpus(seed=3, count=6)


@pytest.fixture
def toy_dataset_dir(tmp_path) -> Path:
    """Balanced two-class dataset: paths (class 1) against rings (class -1)."""
    from app.datasets import Dataset, write_dataset

    graphs, labels = [], []
    for n in range(3, 9):
        graphs.append(graph_factory.path([0, 1] * (n // 2) + [0] * (n % 2)))
        labels.append(1)
        graphs.append(graph_factory.cycle([0, 1] * (n // 2) + [0] * (n % 2), bond=1))
        labels.append(-1)
    ds = Dataset(
        graphs=tuple(graphs),
        class_labels=tuple(labels),
        vertex_label_tokens=("0", "1"),
        edge_label_tokens=("0", "1"),
        source_path="",
        name="TOY",
    )
    return write_dataset(ds, tmp_path / "TOY")

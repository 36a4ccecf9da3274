import logging

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app.config import configure_logging, get_settings

settings = get_settings()
configure_logging(settings.log_level)
logger = logging.getLogger(__name__)

app = FastAPI(title="Graph Kernels API")

logger.info("Frontend URL for CORS: %s", settings.front_end_url)
origins = [
    settings.front_end_url,
    "http://localhost:3000",
    "http://127.0.0.1:3000",
]
app.add_middleware(
    CORSMiddleware,
    allow_origins=origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/")
def read_root():
    return {"message": "Graph Kernels API is running."}


@app.get("/status")
def get_status():
    return {"status": "healthy", "message": "API is running.", "version": "1.0.0"}


from app.cv_runs import router as cv_runs_router
from app.dataset_stats import router as dataset_stats_router
from app.gram_runs import router as gram_runs_router

app.include_router(dataset_stats_router, prefix="/api")
app.include_router(gram_runs_router, prefix="/api")
app.include_router(cv_runs_router, prefix="/api")

# Tables are created on import; existing databases are left as they are
from app import models
from app.database import Base, engine

Base.metadata.create_all(bind=engine)

"""FastAPI service exposing the experiment runner."""
from .app import app, create_app
from .schemas import ExperimentRequest, ExperimentResponse, TrialResult

__all__ = [
    "app",
    "create_app",
    "ExperimentRequest",
    "ExperimentResponse",
    "TrialResult",
]

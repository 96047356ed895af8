"""Request/response models for the experiment service."""
from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class ExperimentRequest(BaseModel):
    algo: Literal["quickhull", "loghull", "triangulate"]
    n: int = Field(ge=1)
    gen: str = "uniform"
    seed: int = 0
    trials: int = Field(default=1, ge=1)
    verify: bool = False
    primitive_cost: int = Field(default=1, ge=1)
    trace: bool = False


class TrialResult(BaseModel):
    algo: str
    n: int
    N: int
    seed: int
    h: int
    rounds: int
    primitives: int
    max_outdeg: int
    max_bits: int
    verified: bool
    trace: list[tuple[int, int, int, int, str]] | None = None


class ExperimentResponse(BaseModel):
    trials: list[TrialResult]
    rounds_min: int
    rounds_median: float
    rounds_max: int
    all_verified: bool

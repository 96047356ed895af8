"""HTTP wrapper around the experiment runner.

Precondition problems map to 400, simulation-integrity failures
(congestion, budget, routing, non-termination) to 500.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException

from ..errors import PreconditionError, SimulationViolation
from ..experiments import aggregates, run_experiment
from .schemas import ExperimentRequest, ExperimentResponse, TrialResult


def create_app() -> FastAPI:
    app = FastAPI(title="cliquegeo", version="1.0.0")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/experiments", response_model=ExperimentResponse)
    def experiments(req: ExperimentRequest) -> ExperimentResponse:
        try:
            rows = run_experiment(
                algo=req.algo,
                n=req.n,
                gen=req.gen,
                seed=req.seed,
                trials=req.trials,
                primitive_cost=req.primitive_cost,
                collect_trace=req.trace,
            )
        except PreconditionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except SimulationViolation as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        agg = aggregates(rows)
        return ExperimentResponse(
            trials=[
                TrialResult(
                    algo=r.algo,
                    n=r.n,
                    N=r.big_n,
                    seed=r.seed,
                    h=r.h,
                    rounds=r.rounds,
                    primitives=r.primitives,
                    max_outdeg=r.max_outdeg,
                    max_bits=r.max_bits,
                    verified=r.verified,
                    trace=list(r.trace) if r.trace is not None else None,
                )
                for r in rows
            ],
            rounds_min=agg["rounds_min"],
            rounds_median=agg["rounds_median"],
            rounds_max=agg["rounds_max"],
            all_verified=agg["all_verified"],
        )

    return app


app = create_app()

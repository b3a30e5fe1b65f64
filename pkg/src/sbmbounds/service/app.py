"""HTTP service exposing the package operations.

Every endpoint is a stateless wrapper over a core function; all randomness
is keyed by (seed, stream_id) from the request, so responses are
deterministic. Domain failures map to 422, exhausted budgets to 400.
"""

from __future__ import annotations

import json
import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import BudgetError, DomainError
from ..experiments import TABLE1_KS, run_distinguish, run_grid, run_table1
from ..graphgen import (
    Graph,
    RandomStream,
    sample_er,
    sample_er_fixed_m,
    sample_planted,
    sample_sbm_fixed_m,
)
from ..params import average_degree, params_from_dict
from ..partition import Partition, exhaustive_detect
from ..secondmoment import max_phi, second_moment_trials
from ..thresholds import threshold_report
from . import schemas

GENERATE_MODELS = ("planted", "er", "er_fixed_m", "sbm_fixed_m")


class NumericJSONResponse(JSONResponse):
    """json.dumps with allow_nan so infinities survive serialization."""

    def render(self, content) -> bytes:
        return json.dumps(
            content, ensure_ascii=False, allow_nan=True, separators=(",", ":")
        ).encode("utf-8")


def create_app() -> FastAPI:
    app = FastAPI(title="sbmbounds", default_response_class=NumericJSONResponse)

    @app.exception_handler(DomainError)
    async def _domain_error(request: Request, exc: DomainError):
        return NumericJSONResponse({"error": "domain", "detail": str(exc)}, status_code=422)

    @app.exception_handler(BudgetError)
    async def _budget_error(request: Request, exc: BudgetError):
        return NumericJSONResponse({"error": "budget", "detail": str(exc)}, status_code=400)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/thresholds", response_model=schemas.ThresholdsOut)
    def thresholds(req: schemas.ThresholdsIn):
        rep = threshold_report(req.k, req.lam)
        return schemas.ThresholdsOut(**rep.to_dict())

    @app.post("/table1", response_model=schemas.Table1Out)
    def table1(req: schemas.Table1In):
        ks = req.ks if req.ks is not None else list(TABLE1_KS)
        rows = [schemas.Table1Row(k=k, lambda_star=ls) for k, ls in run_table1(ks)]
        return schemas.Table1Out(rows=rows)

    @app.post("/grid", response_model=schemas.GridOut)
    def grid(req: schemas.GridIn):
        rows = [schemas.ThresholdsOut(**rep.to_dict()) for rep in run_grid(req.ks, req.lambdas)]
        return schemas.GridOut(rows=rows)

    @app.post("/generate", response_model=schemas.GraphOut)
    def generate(req: schemas.GenerateIn):
        p = params_from_dict(req.params.as_dict())
        rng = RandomStream(req.seed, req.stream_id)
        labels = None
        if req.model == "planted":
            sigma, g = sample_planted(p, rng)
            labels = [int(x) for x in sigma]
        elif req.model == "er":
            g = sample_er(p.n, average_degree(p), rng)
        elif req.model == "er_fixed_m":
            if req.m is None:
                raise DomainError("er_fixed_m requires m")
            g = sample_er_fixed_m(p.n, req.m, rng)
        elif req.model == "sbm_fixed_m":
            if req.m is None:
                raise DomainError("sbm_fixed_m requires m")
            if p.n % p.k != 0:
                raise DomainError("sbm_fixed_m requires k | n")
            sigma = [v * p.k // p.n for v in range(p.n)]
            g = sample_sbm_fixed_m(p, sigma, req.m, rng)
            labels = sigma
        else:
            raise DomainError(f"unknown model {req.model!r}, expected one of {GENERATE_MODELS}")
        return schemas.GraphOut(n=g.n, edges=[[u, v] for u, v in g.edges], labels=labels)

    @app.post("/detect", response_model=schemas.DetectOut)
    def detect(req: schemas.DetectIn):
        g = Graph.from_pairs(req.graph.n, [(e[0], e[1]) for e in req.graph.edges])
        p = params_from_dict(
            {
                "k": req.k,
                "n": g.n,
                "c_in": req.c_in,
                "c_out": req.c_out,
                "d": req.d,
                "lambda": req.lam,
            }
        )
        tau = exhaustive_detect(g, p, budget=req.budget)
        if tau is None:
            return schemas.DetectOut(found=False, labels=None)
        return schemas.DetectOut(found=True, labels=list(tau.labels))

    @app.post("/phi", response_model=schemas.PhiOut)
    def phi_endpoint(req: schemas.PhiIn):
        rep = max_phi(
            req.k, req.d, req.lam, restarts=req.restarts, rng=RandomStream(req.seed, req.stream_id)
        )
        d = rep.to_dict()
        return schemas.PhiOut(**d)

    @app.post("/secondmoment", response_model=schemas.SecondMomentOut)
    def secondmoment(req: schemas.SecondMomentIn):
        vals = second_moment_trials(
            req.k, req.d, req.lam, req.n, req.trials, RandomStream(req.seed, req.stream_id)
        )
        stderr = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        return schemas.SecondMomentOut(
            k=req.k,
            d=req.d,
            lam=req.lam,
            n=req.n,
            trials=req.trials,
            estimate=float(vals.mean()),
            stderr=stderr,
        )

    @app.post("/distinguish", response_model=schemas.DistinguishOut)
    def distinguish(req: schemas.DistinguishIn):
        p = params_from_dict(req.params.as_dict())
        res = run_distinguish(
            p,
            req.trials,
            RandomStream(req.seed, req.stream_id),
            budget=req.budget,
            workers=req.workers,
        )
        out = res.to_dict()
        out["lam"] = out.pop("lambda")
        return schemas.DistinguishOut(**out)

    return app


app = create_app()

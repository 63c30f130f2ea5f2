"""HTTP service wrapping the simulation package.

Quick operations (generate, rank, simulate, report) answer synchronously;
sweeps run as background jobs that are polled by id and downloaded as CSV
once done. Jobs live in process memory; this is a single-process compute
service, not a persistent job store.
"""

from __future__ import annotations

import threading
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__, experiments
from ..errors import EpisimError
from ..graph import Graph, Partition, inter_community_fraction, remove_nodes
from ..lfr import LfrParams, generate
from ..sir import SirParams, outcome_on_reduced
from ..strategies import COMMUNITY_KINDS, StrategyKind, build_plan
from .schemas import (
    GenerateRequest,
    GenerateResponse,
    HealthResponse,
    RankRequest,
    RankResponse,
    ReportRequest,
    ReportResponse,
    SimulateRequest,
    SimulateResponse,
    SweepJobStatus,
    SweepRequest,
)

app = FastAPI(title="episim service", version=__version__)


class _Job:
    def __init__(self):
        self.state = "queued"
        self.error: str | None = None
        self.records: list | None = None


class _JobRegistry:
    def __init__(self):
        self._jobs: dict[str, _Job] = {}
        self._lock = threading.Lock()

    def create(self) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = _Job()
        return job_id

    def get(self, job_id: str) -> _Job:
        with self._lock:
            job = self._jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown sweep job {job_id!r}")
        return job


_registry = _JobRegistry()


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/generate", response_model=GenerateResponse)
def generate_network(req: GenerateRequest) -> GenerateResponse:
    params = LfrParams(**req.model_dump())
    try:
        params.validate()
        g, p = generate(params)
    except EpisimError as exc:
        raise _bad_request(exc) from None
    return GenerateResponse(
        node_count=g.node_count,
        edge_count=g.edge_count,
        community_count=len(p.members),
        achieved_mixing=inter_community_fraction(g, p),
        edges=list(g.iter_edges()),
        communities=list(p.community_of),
    )


@app.post("/rank", response_model=RankResponse)
def rank(req: RankRequest) -> RankResponse:
    try:
        kind = StrategyKind(req.strategy)
        g = Graph.from_edges(req.edges, node_count=req.node_count)
        partition = None
        if req.communities is not None:
            partition = Partition(req.communities)
        if kind in COMMUNITY_KINDS and partition is None:
            raise EpisimError(f"strategy {kind.value} needs a community assignment")
        plan = build_plan(
            g,
            kind,
            req.fraction,
            partition=partition,
            rng=np.random.default_rng(req.seed),
            recalc_interval=req.recalc_interval,
        )
    except (EpisimError, ValueError) as exc:
        raise _bad_request(exc) from None
    return RankResponse(order=list(plan.order), strategy=kind.value, fraction=req.fraction)


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    try:
        g = Graph.from_edges(req.edges, node_count=req.node_count)
        params = SirParams(
            transmission_rate=req.transmission_rate,
            recovery_rate=req.recovery_rate,
            initial_infected_fraction=req.initial_infected_fraction,
            max_steps=req.max_steps,
            seed=req.seed,
        )
        params.validate()
        reduced = remove_nodes(g, req.plan)
        outcome = outcome_on_reduced(reduced, params, update_rule=req.update_rule)
    except EpisimError as exc:
        raise _bad_request(exc) from None
    return SimulateResponse(
        total_ever_infected=outcome.total_ever_infected,
        peak_infected=outcome.peak_infected,
        duration=outcome.duration,
        seeded=outcome.seeded,
        truncated=outcome.truncated,
        series=list(outcome.series),
    )


def _run_sweep_job(job: _Job, req: SweepRequest) -> None:
    try:
        cfg = experiments.parse_config(req.config_text)
        records = experiments.run_sweep(
            cfg,
            cache_dir=experiments.default_cache_dir(),
            workers=req.workers or None,
        )
        job.records = records
        job.state = "done"
    except Exception as exc:  # surfaced through the status endpoint
        job.error = str(exc)
        job.state = "failed"


@app.post("/sweeps", response_model=SweepJobStatus, status_code=202)
def submit_sweep(req: SweepRequest) -> SweepJobStatus:
    try:
        experiments.parse_config(req.config_text)
    except EpisimError as exc:
        raise _bad_request(exc) from None
    job_id = _registry.create()
    job = _registry.get(job_id)
    job.state = "running"
    thread = threading.Thread(target=_run_sweep_job, args=(job, req), daemon=True)
    thread.start()
    return SweepJobStatus(job_id=job_id, state=job.state)


@app.get("/sweeps/{job_id}", response_model=SweepJobStatus)
def sweep_status(job_id: str) -> SweepJobStatus:
    job = _registry.get(job_id)
    return SweepJobStatus(
        job_id=job_id,
        state=job.state,
        error=job.error,
        record_count=None if job.records is None else len(job.records),
    )


@app.get("/sweeps/{job_id}/records.csv", response_class=PlainTextResponse)
def sweep_records(job_id: str) -> str:
    job = _registry.get(job_id)
    if job.state != "done" or job.records is None:
        raise HTTPException(status_code=409, detail=f"sweep job {job_id!r} is {job.state}")
    return experiments.format_records(job.records)


@app.post("/report", response_model=ReportResponse)
def report(req: ReportRequest) -> ReportResponse:
    try:
        records = experiments.parse_records(req.csv_text)
        summaries = experiments.summarize_deaths(
            records,
            node_count=req.nodes,
            seed_fraction=req.seed_fraction,
            threshold=req.threshold,
        )
    except EpisimError as exc:
        raise _bad_request(exc) from None
    return ReportResponse(csv_text=experiments.format_deaths(summaries))

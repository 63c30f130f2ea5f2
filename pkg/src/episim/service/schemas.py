"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class GenerateRequest(BaseModel):
    n: int
    avg_degree: float
    max_degree: int
    mu: float
    gamma: float = 3.0
    beta: float = 2.0
    c_min: int
    c_max: int
    mixing_tolerance: float = 0.02
    max_rewire_sweeps: int = 100
    seed: int = 0


class GenerateResponse(BaseModel):
    node_count: int
    edge_count: int
    community_count: int
    achieved_mixing: float
    edges: list[tuple[int, int]]
    communities: list[int]


class RankRequest(BaseModel):
    edges: list[tuple[int, int]]
    node_count: int | None = None
    communities: list[int] | None = None
    strategy: str
    fraction: float
    seed: int = 0
    recalc_interval: int = 1


class RankResponse(BaseModel):
    order: list[int]
    strategy: str
    fraction: float


class SimulateRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    edges: list[tuple[int, int]]
    node_count: int | None = None
    plan: list[int] = Field(default_factory=list)
    transmission_rate: float = Field(alias="lambda")
    recovery_rate: float = Field(alias="sigma")
    initial_infected_fraction: float = 0.01
    max_steps: int = 100_000
    seed: int = 0
    update_rule: str = "snapshot"


class SimulateResponse(BaseModel):
    total_ever_infected: int
    peak_infected: int
    duration: int
    seeded: int
    truncated: bool
    series: list[tuple[int, int, int]]


class SweepRequest(BaseModel):
    config_text: str
    workers: int = 0


class SweepJobStatus(BaseModel):
    job_id: str
    state: str
    error: str | None = None
    record_count: int | None = None


class ReportRequest(BaseModel):
    csv_text: str
    threshold: float = 0.01
    nodes: int = 7500
    seed_fraction: float = 0.01


class ReportResponse(BaseModel):
    csv_text: str


class HealthResponse(BaseModel):
    status: str
    version: str

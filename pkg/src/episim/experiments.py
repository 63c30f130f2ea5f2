"""Experiment orchestration: ensembles, plans, replicated epidemics, records.

A sweep walks the full grid (mu x lambda x sigma x strategy x fraction),
generating ``networks_per_mu`` networks per mixing value, building one plan
per (network, strategy), running ``replicates_per_network`` epidemics per
cell member and aggregating mean and population standard deviation of the
total infected count.

Reproducibility contract: every randomized stage draws from a generator
seeded by :func:`episim.seeding.derive_seed` with the master seed and the
cell coordinates -

  * network (mu, i):            ("lfr", mu, i)
  * plan (mu, i, strategy):     ("plan", mu, i, strategy)
  * epidemic (cell, i, rep):    ("sir", mu, lambda, sigma, strategy,
                                 fraction, i, rep)

so any cell can be recomputed in isolation, results do not depend on worker
scheduling, and a rerun with the same master seed writes a byte-identical
CSV.

Networks and the expensive full-order plans are cached on disk keyed by
their full parameter set, so strategies are always compared on identical
graphs and repeated sweeps skip the generation cost.

Plans at smaller fractions are prefixes of the plan at the largest requested
fraction (all sequential planners select one node at a time, and stochastic
planners are seeded per network, not per fraction), so each strategy is
planned once per network at the largest fraction and sliced.

Performance note: the one contract relaxation at benchmark scale is the
betweenness recalculation cadence. Rescoring after every single removal is
O(removals * n * m) and out of reach for n in the thousands, so sweeps
rescore global-betweenness plans every ``betweenness_recalc_chunk * n``
removals (default 1% of n, which is 1 on small graphs and therefore exact).
Global-degree plans always rescore after every removal.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import fileio
from ._util import round_half_up
from .errors import ConfigurationError, EpisimError, GenerationFailure
from .graph import Graph, Partition, remove_nodes
from .lfr import LfrParams, generate, generation_metadata
from .seeding import derive_seed, rng_for
from .sir import SirParams, outcome_on_reduced
from .strategies import (
    COMMUNITY_KINDS,
    GLOBAL_KINDS,
    ImmunizationPlan,
    StrategyKind,
    plan_cbf,
    plan_community,
    plan_global,
    plan_random,
)

RECORDS_HEADER = (
    "mu,lambda,sigma,strategy,fraction_removed,"
    "mean_total_infected,std_total_infected,sample_count"
)

DEATHS_HEADER = "mu,lambda,sigma,strategy,death_fraction"


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; see :func:`parse_config` for the file form."""

    n: int
    avg_degree: float
    max_degree: int
    gamma: float
    beta: float
    c_min: int
    c_max: int
    mu_values: tuple[float, ...]
    networks_per_mu: int
    lambda_values: tuple[float, ...]
    sigma_values: tuple[float, ...]
    strategies: tuple[StrategyKind, ...]
    fractions: tuple[float, ...]
    replicates_per_network: int = 1
    initial_infected_fraction: float = 0.01
    max_steps: int = 100_000
    mixing_tolerance: float = 0.02
    max_rewire_sweeps: int = 100
    master_seed: int = 0
    output_path: str = "sweep.csv"
    betweenness_recalc_chunk: float = 0.01
    workers: int = 0

    def validate(self) -> None:
        if not self.mu_values or not self.lambda_values or not self.sigma_values:
            raise ConfigurationError("mu, lambda and sigma grids must be non-empty")
        if not self.strategies or not self.fractions:
            raise ConfigurationError("strategy and fraction grids must be non-empty")
        for name, grid in (
            ("mu", self.mu_values),
            ("lambda", self.lambda_values),
            ("sigma", self.sigma_values),
            ("fraction", self.fractions),
        ):
            for value in grid:
                if not 0.0 <= value <= 1.0:
                    raise ConfigurationError(f"{name} value {value} outside [0, 1]")
        if self.networks_per_mu <= 0 or self.replicates_per_network <= 0:
            raise ConfigurationError("network and replicate counts must be positive")
        if not 0.0 <= self.betweenness_recalc_chunk <= 1.0:
            raise ConfigurationError("betweenness_recalc_chunk must be in [0, 1]")
        self.lfr_params(self.mu_values[0], seed=0).validate()

    def lfr_params(self, mu: float, seed: int) -> LfrParams:
        return LfrParams(
            n=self.n,
            avg_degree=self.avg_degree,
            max_degree=self.max_degree,
            mu=mu,
            gamma=self.gamma,
            beta=self.beta,
            c_min=self.c_min,
            c_max=self.c_max,
            mixing_tolerance=self.mixing_tolerance,
            max_rewire_sweeps=self.max_rewire_sweeps,
            seed=seed,
        )

    def sir_params(self, lam: float, sigma: float) -> SirParams:
        return SirParams(
            transmission_rate=lam,
            recovery_rate=sigma,
            initial_infected_fraction=self.initial_infected_fraction,
            max_steps=self.max_steps,
        )

    def grid_size(self) -> int:
        return (
            len(self.mu_values)
            * len(self.lambda_values)
            * len(self.sigma_values)
            * len(self.strategies)
            * len(self.fractions)
        )

    def recalc_interval(self) -> int:
        return max(1, round_half_up(self.betweenness_recalc_chunk * self.n))


@dataclass(frozen=True)
class SweepRecord:
    """One aggregated grid cell. ``mean``/``std`` are None when the cell's
    ensemble could not be fully generated (the cell is marked failed)."""

    mu: float
    transmission_rate: float
    recovery_rate: float
    strategy: StrategyKind
    fraction_removed: float
    mean_total_infected: float | None
    std_total_infected: float | None
    sample_count: int


# -- config file --------------------------------------------------------------

_SCALAR_KEYS = {
    "n": int,
    "avg_degree": float,
    "max_degree": int,
    "gamma": float,
    "beta": float,
    "c_min": int,
    "c_max": int,
    "networks_per_mu": int,
    "replicates_per_network": int,
    "initial_infected_fraction": float,
    "max_steps": int,
    "mixing_tolerance": float,
    "max_rewire_sweeps": int,
    "master_seed": int,
    "output_path": str,
    "betweenness_recalc_chunk": float,
    "workers": int,
}

_LIST_KEYS = {
    "mu": float,
    "lambda": float,
    "sigma": float,
    "strategy": str,
    "fraction": float,
}

_REQUIRED_KEYS = (
    "n",
    "avg_degree",
    "max_degree",
    "gamma",
    "beta",
    "c_min",
    "c_max",
    "networks_per_mu",
    "mu",
    "lambda",
    "sigma",
    "strategy",
    "fraction",
)


def parse_config(text: str) -> ExperimentConfig:
    """Parse the plain-text sweep configuration.

    One ``key = value`` per line; repeating a key (mu, lambda, sigma,
    strategy, fraction) builds a list; ``#`` starts a comment.
    """
    scalars: dict = {}
    lists: dict[str, list] = {key: [] for key in _LIST_KEYS}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"config line {lineno}: expected 'key = value'")
        key, value = key.strip(), value.strip()
        try:
            if key in _LIST_KEYS:
                lists[key].append(_LIST_KEYS[key](value))
            elif key in _SCALAR_KEYS:
                scalars[key] = _SCALAR_KEYS[key](value)
            else:
                raise ConfigurationError(f"config line {lineno}: unknown key {key!r}")
        except ValueError:
            raise ConfigurationError(
                f"config line {lineno}: bad value {value!r} for {key!r}"
            ) from None
    missing = [k for k in _REQUIRED_KEYS if (k in _LIST_KEYS and not lists[k]) or (
        k in _SCALAR_KEYS and k not in scalars
    )]
    if missing:
        raise ConfigurationError(f"config is missing keys: {', '.join(missing)}")
    try:
        strategies = tuple(StrategyKind(s) for s in lists["strategy"])
    except ValueError as exc:
        raise ConfigurationError(f"unknown strategy in config: {exc}") from None
    cfg = ExperimentConfig(
        mu_values=tuple(lists["mu"]),
        lambda_values=tuple(lists["lambda"]),
        sigma_values=tuple(lists["sigma"]),
        strategies=strategies,
        fractions=tuple(lists["fraction"]),
        **scalars,
    )
    cfg.validate()
    return cfg


def read_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def format_config(cfg: ExperimentConfig) -> str:
    lines = []
    for key in _SCALAR_KEYS:
        value = getattr(cfg, key)
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    for mu in cfg.mu_values:
        lines.append(f"mu = {mu!r}")
    for lam in cfg.lambda_values:
        lines.append(f"lambda = {lam!r}")
    for sig in cfg.sigma_values:
        lines.append(f"sigma = {sig!r}")
    for kind in cfg.strategies:
        lines.append(f"strategy = {kind.value}")
    for frac in cfg.fractions:
        lines.append(f"fraction = {frac!r}")
    lines.append("")
    return "\n".join(lines)


# -- disk cache -----------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get("EPISIM_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "episim"


def _network_key(params: LfrParams) -> str:
    canon = (
        f"n={params.n}|k={params.avg_degree!r}|kmax={params.max_degree}"
        f"|mu={params.mu!r}|gamma={params.gamma!r}|beta={params.beta!r}"
        f"|cmin={params.c_min}|cmax={params.c_max}|tol={params.mixing_tolerance!r}"
        f"|sweeps={params.max_rewire_sweeps}|seed={params.seed}"
    )
    return hashlib.blake2b(canon.encode(), digest_size=16).hexdigest()


def network_params(cfg: ExperimentConfig, mu: float, index: int) -> LfrParams:
    return cfg.lfr_params(mu, seed=derive_seed(cfg.master_seed, "lfr", mu, index))


def ensure_network(
    params: LfrParams, cache_dir: str | Path | None
) -> tuple[Graph, Partition]:
    """Load the network for ``params`` from the cache, generating and caching
    it on a miss. ``cache_dir=None`` disables caching entirely."""
    if cache_dir is None:
        return generate(params)
    base = Path(cache_dir) / "networks" / _network_key(params)
    edges = base.with_suffix(".edges")
    comms = base.with_suffix(".communities")
    meta = base.with_suffix(".meta")
    if edges.exists() and comms.exists() and meta.exists():
        g = fileio.read_edge_list(edges, node_count=params.n)
        p = fileio.read_communities(comms, node_count=params.n)
        return g, p
    g, p = generate(params)
    fileio.write_edge_list(g, edges)
    fileio.write_communities(p, comms)
    fileio.write_metadata(generation_metadata(params, g, p), meta)
    return g, p


def _plan_cache_path(
    cache_dir: Path, network_key: str, kind: StrategyKind, seed: int, quota: int, interval: int
) -> Path:
    canon = f"{network_key}|{kind.value}|seed={seed}|quota={quota}|interval={interval}"
    digest = hashlib.blake2b(canon.encode(), digest_size=16).hexdigest()
    return cache_dir / "plans" / f"{digest}.plan"


def full_plan_order(
    g: Graph,
    p: Partition,
    kind: StrategyKind,
    cfg: ExperimentConfig,
    mu: float,
    index: int,
    cache_dir: str | Path | None,
) -> tuple[int, ...] | None:
    """Removal order at the largest requested fraction, disk-cached.

    Community strategies return None: their quotas are rounded per fraction,
    so they are planned per fraction instead of sliced."""
    if kind in COMMUNITY_KINDS:
        return None
    max_fraction = max(cfg.fractions)
    quota = round_half_up(max_fraction * g.node_count)
    seed = derive_seed(cfg.master_seed, "plan", mu, index, kind.value)
    interval = cfg.recalc_interval() if kind is StrategyKind.GLOBAL_BETWEENNESS else 1

    cache_path = None
    if cache_dir is not None:
        key = _network_key(network_params(cfg, mu, index))
        cache_path = _plan_cache_path(Path(cache_dir), key, kind, seed, quota, interval)
        if cache_path.exists():
            text = cache_path.read_text().split()
            return tuple(int(t) for t in text)

    if kind in GLOBAL_KINDS:
        plan = plan_global(g, kind, max_fraction, recalc_interval=interval)
    elif kind is StrategyKind.CBF:
        plan = plan_cbf(g, max_fraction, np.random.default_rng(seed))
    else:
        plan = plan_random(g, max_fraction, np.random.default_rng(seed))
    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = cache_path.with_name(f".{cache_path.name}.{os.getpid()}.tmp")
        tmp.write_text(" ".join(str(i) for i in plan.order) + "\n")
        os.replace(tmp, cache_path)
    return plan.order


# -- sweep ------------------------------------------------------------------------


def _network_job(args) -> tuple[float, int, dict | None, str | None]:
    """Worker: one (mu, network index) - generate/load, plan, simulate every
    cell this network participates in. Returns cell totals keyed by
    (mu, lambda, sigma, strategy value, fraction)."""
    cfg, mu, index, cache_dir = args
    try:
        params = network_params(cfg, mu, index)
        g, p = ensure_network(params, cache_dir)
    except GenerationFailure as exc:
        return (mu, index, None, str(exc))

    n = g.node_count
    full_orders = {
        kind: full_plan_order(g, p, kind, cfg, mu, index, cache_dir)
        for kind in cfg.strategies
    }
    totals: dict[tuple, list[int]] = {}
    for kind in cfg.strategies:
        for fraction in cfg.fractions:
            if kind in COMMUNITY_KINDS:
                plan = plan_community(g, p, kind, fraction)
            else:
                quota = round_half_up(fraction * n)
                plan = ImmunizationPlan(full_orders[kind][:quota], kind, fraction)
            reduced = remove_nodes(g, plan.order)
            for lam in cfg.lambda_values:
                for sigma in cfg.sigma_values:
                    cell = (mu, lam, sigma, kind.value, fraction)
                    outcomes = []
                    for rep in range(cfg.replicates_per_network):
                        rng = rng_for(
                            cfg.master_seed,
                            "sir",
                            mu,
                            lam,
                            sigma,
                            kind.value,
                            fraction,
                            index,
                            rep,
                        )
                        out = outcome_on_reduced(reduced, cfg.sir_params(lam, sigma), rng)
                        outcomes.append(out.total_ever_infected)
                    totals[cell] = outcomes
    return (mu, index, totals, None)


def run_sweep(
    cfg: ExperimentConfig,
    *,
    cache_dir: str | Path | None = None,
    workers: int | None = None,
) -> list[SweepRecord]:
    """Execute the full grid and aggregate. See the module docstring for the
    seeding, caching and reproducibility contract."""
    cfg.validate()
    if workers is None:
        workers = cfg.workers or 0
    jobs = [
        (cfg, mu, index, cache_dir)
        for mu in cfg.mu_values
        for index in range(cfg.networks_per_mu)
    ]
    results: dict[tuple[float, int], tuple[dict | None, str | None]] = {}
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            for (mu, index, totals, error) in pool.map(_network_job, jobs):
                results[(mu, index)] = (totals, error)
    else:
        for job in jobs:
            mu, index, totals, error = _network_job(job)
            results[(mu, index)] = (totals, error)

    records: list[SweepRecord] = []
    expected = cfg.networks_per_mu * cfg.replicates_per_network
    for mu in cfg.mu_values:
        ensemble = [results[(mu, index)] for index in range(cfg.networks_per_mu)]
        failed = any(totals is None for totals, _ in ensemble)
        for lam in cfg.lambda_values:
            for sigma in cfg.sigma_values:
                for kind in cfg.strategies:
                    for fraction in cfg.fractions:
                        cell = (mu, lam, sigma, kind.value, fraction)
                        samples: list[int] = []
                        for totals, _ in ensemble:
                            if totals is not None:
                                samples.extend(totals[cell])
                        if failed or len(samples) != expected:
                            records.append(
                                SweepRecord(mu, lam, sigma, kind, fraction, None, None, len(samples))
                            )
                        else:
                            arr = np.asarray(samples, dtype=np.float64)
                            records.append(
                                SweepRecord(
                                    mu,
                                    lam,
                                    sigma,
                                    kind,
                                    fraction,
                                    float(arr.mean()),
                                    float(arr.std()),
                                    len(samples),
                                )
                            )
    return records


# -- records CSV -----------------------------------------------------------------


def format_records(records: Iterable[SweepRecord]) -> str:
    lines = [RECORDS_HEADER]
    for rec in records:
        mean = "" if rec.mean_total_infected is None else repr(rec.mean_total_infected)
        std = "" if rec.std_total_infected is None else repr(rec.std_total_infected)
        lines.append(
            f"{rec.mu!r},{rec.transmission_rate!r},{rec.recovery_rate!r},"
            f"{rec.strategy.value},{rec.fraction_removed!r},{mean},{std},{rec.sample_count}"
        )
    lines.append("")
    return "\n".join(lines)


def write_records(records: Iterable[SweepRecord], path: str | Path) -> None:
    path = Path(path)
    try:
        fileio._atomic_write(path, format_records(records))
    except OSError as exc:
        raise EpisimError(f"cannot write records to {path}: {exc}") from exc


def parse_records(text: str) -> list[SweepRecord]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != RECORDS_HEADER:
        raise ConfigurationError(f"records CSV must start with header {RECORDS_HEADER!r}")
    records = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != 8:
            raise ConfigurationError(f"bad records row: {line!r}")
        records.append(
            SweepRecord(
                mu=float(parts[0]),
                transmission_rate=float(parts[1]),
                recovery_rate=float(parts[2]),
                strategy=StrategyKind(parts[3]),
                fraction_removed=float(parts[4]),
                mean_total_infected=float(parts[5]) if parts[5] else None,
                std_total_infected=float(parts[6]) if parts[6] else None,
                sample_count=int(parts[7]),
            )
        )
    return records


def read_records(path: str | Path) -> list[SweepRecord]:
    return parse_records(Path(path).read_text())


# -- outbreak-death report ----------------------------------------------------------


@dataclass(frozen=True)
class DeathSummary:
    mu: float
    transmission_rate: float
    recovery_rate: float
    strategy: StrategyKind
    death_fraction: float | None


def death_threshold(node_count: int, fraction_removed: float, seed_fraction: float, threshold: float) -> float:
    """Mean-total-infected level at which the outbreak counts as dead: the
    seeds plus ``threshold`` of the active (non-immunized) population."""
    active = node_count - round_half_up(fraction_removed * node_count)
    seeds = round_half_up(seed_fraction * active)
    return seeds + threshold * active


def summarize_deaths(
    records: Sequence[SweepRecord],
    *,
    node_count: int,
    seed_fraction: float = 0.01,
    threshold: float = 0.01,
) -> list[DeathSummary]:
    """Per (mu, lambda, sigma, strategy): the smallest removal fraction whose
    mean total infected is at or below the outbreak-death level."""
    groups: dict[tuple, list[SweepRecord]] = {}
    order: list[tuple] = []
    for rec in records:
        key = (rec.mu, rec.transmission_rate, rec.recovery_rate, rec.strategy)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    summaries = []
    for key in order:
        death = None
        for rec in sorted(groups[key], key=lambda r: r.fraction_removed):
            if rec.mean_total_infected is None:
                continue
            level = death_threshold(node_count, rec.fraction_removed, seed_fraction, threshold)
            if rec.mean_total_infected <= level:
                death = rec.fraction_removed
                break
        summaries.append(DeathSummary(*key, death))
    return summaries


def format_deaths(summaries: Iterable[DeathSummary]) -> str:
    lines = [DEATHS_HEADER]
    for s in summaries:
        death = "" if s.death_fraction is None else repr(s.death_fraction)
        lines.append(
            f"{s.mu!r},{s.transmission_rate!r},{s.recovery_rate!r},{s.strategy.value},{death}"
        )
    lines.append("")
    return "\n".join(lines)

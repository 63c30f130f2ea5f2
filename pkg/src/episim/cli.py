"""Command-line interface.

Five subcommands mirror the package surface: ``generate`` (benchmark network
files), ``rank`` (an immunization plan for one strategy), ``simulate`` (a
single epidemic time series), ``sweep`` (the full experiment grid) and
``report`` (outbreak-death fractions from a sweep CSV). ``serve`` starts the
HTTP service, and every other subcommand accepts ``--server URL`` to run as
a thin client against it instead of computing in-process.

Exit codes: 0 success, 1 invalid input/config or runtime failure, 2 usage.
If ``EPISIM_OUTPUT_DIR`` is set, relative output paths land inside it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from . import experiments, fileio
from .errors import EpisimError
from .graph import Graph, Partition
from .lfr import LfrParams, generate, generation_metadata
from .sir import UPDATE_RULES, SirParams, run, run_immunized
from .strategies import COMMUNITY_KINDS, ImmunizationPlan, StrategyKind, build_plan

_STRATEGY_NAMES = sorted(kind.value for kind in StrategyKind)


def _out_path(path: str) -> Path:
    base = os.environ.get("EPISIM_OUTPUT_DIR")
    p = Path(path)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _http_json(url: str, payload: dict | None = None, timeout: float = 600.0) -> dict:
    data = None
    headers = {"Accept": "application/json"}
    if payload is not None:
        data = json.dumps(payload).encode()
        headers["Content-Type"] = "application/json"
    request = urllib.request.Request(url, data=data, headers=headers)
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            return json.loads(response.read().decode())
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        raise EpisimError(f"server error {exc.code} from {url}: {detail}") from None
    except urllib.error.URLError as exc:
        raise EpisimError(f"cannot reach server at {url}: {exc.reason}") from None


def _http_text(url: str, timeout: float = 600.0) -> str:
    request = urllib.request.Request(url, headers={"Accept": "text/csv"})
    try:
        with urllib.request.urlopen(request, timeout=timeout) as response:
            return response.read().decode()
    except urllib.error.HTTPError as exc:
        detail = exc.read().decode(errors="replace")
        raise EpisimError(f"server error {exc.code} from {url}: {detail}") from None
    except urllib.error.URLError as exc:
        raise EpisimError(f"cannot reach server at {url}: {exc.reason}") from None


def _load_graph(args) -> Graph:
    node_count = getattr(args, "nodes", None)
    return fileio.read_edge_list(args.edges, node_count=node_count)


# -- subcommand handlers ------------------------------------------------------


def _cmd_generate(args) -> int:
    params = LfrParams(
        n=args.nodes,
        avg_degree=args.avg_degree,
        max_degree=args.max_degree,
        mu=args.mu,
        gamma=args.gamma,
        beta=args.beta,
        c_min=args.c_min,
        c_max=args.c_max,
        mixing_tolerance=args.mixing_tolerance,
        max_rewire_sweeps=args.max_rewire_sweeps,
        seed=args.seed,
    )
    if args.server:
        body = _http_json(f"{args.server}/generate", _params_payload(params))
        g = Graph.from_edges(body["edges"], node_count=body["node_count"])
        p = Partition(body["communities"])
    else:
        params.validate()
        g, p = generate(params)
    prefix = _out_path(args.out)
    edges_path = prefix.parent / (prefix.name + ".edges")
    fileio.write_edge_list(g, edges_path)
    fileio.write_communities(p, prefix.parent / (prefix.name + ".communities"))
    meta = generation_metadata(params, g, p)
    fileio.write_metadata(meta, prefix.parent / (prefix.name + ".meta"))
    print(
        f"wrote {edges_path} ({g.node_count} nodes, "
        f"{g.edge_count} edges, mixing {meta['achieved_mixing']:.4f})"
    )
    return 0


def _params_payload(params: LfrParams) -> dict:
    return {
        "n": params.n,
        "avg_degree": params.avg_degree,
        "max_degree": params.max_degree,
        "mu": params.mu,
        "gamma": params.gamma,
        "beta": params.beta,
        "c_min": params.c_min,
        "c_max": params.c_max,
        "mixing_tolerance": params.mixing_tolerance,
        "max_rewire_sweeps": params.max_rewire_sweeps,
        "seed": params.seed,
    }


def _cmd_rank(args) -> int:
    kind = StrategyKind(args.strategy)
    if args.server:
        payload = {
            "edges": [list(e) for e in fileio.read_edge_list(args.edges).iter_edges()],
            "communities": None,
            "strategy": kind.value,
            "fraction": args.fraction,
            "seed": args.seed,
            "recalc_interval": args.recalc_interval,
        }
        if args.communities:
            payload["communities"] = list(
                fileio.read_communities(args.communities).community_of
            )
        body = _http_json(f"{args.server}/rank", payload)
        order = body["order"]
    else:
        g = fileio.read_edge_list(args.edges)
        partition = None
        if args.communities:
            partition = fileio.read_communities(args.communities, node_count=g.node_count)
        if kind in COMMUNITY_KINDS and partition is None:
            raise EpisimError(f"strategy {kind.value} needs --communities")
        plan = build_plan(
            g,
            kind,
            args.fraction,
            partition=partition,
            rng=np.random.default_rng(args.seed),
            recalc_interval=args.recalc_interval,
        )
        order = plan.order
    sys.stdout.write(fileio.format_plan_csv(order, kind.value, args.fraction))
    return 0


def _cmd_simulate(args) -> int:
    if args.server:
        payload = {
            "edges": [list(e) for e in fileio.read_edge_list(args.edges).iter_edges()],
            "plan": fileio.parse_plan_csv(Path(args.plan).read_text()) if args.plan else [],
            "lambda": args.lam,
            "sigma": args.sigma,
            "initial_infected_fraction": args.initial_infected_fraction,
            "max_steps": args.max_steps,
            "seed": args.seed,
            "update_rule": args.update_rule,
        }
        body = _http_json(f"{args.server}/simulate", payload)
        series = body["series"]
        total, duration = body["total_ever_infected"], body["duration"]
    else:
        g = _load_graph(args)
        params = SirParams(
            transmission_rate=args.lam,
            recovery_rate=args.sigma,
            initial_infected_fraction=args.initial_infected_fraction,
            max_steps=args.max_steps,
            seed=args.seed,
        )
        params.validate()
        if args.plan:
            order = fileio.parse_plan_csv(Path(args.plan).read_text())
            plan = ImmunizationPlan(tuple(order), StrategyKind.RANDOM, 0.0)
            outcome = run_immunized(g, plan, params, update_rule=args.update_rule)
        else:
            outcome = run(g, params, update_rule=args.update_rule)
        series, total, duration = outcome.series, outcome.total_ever_infected, outcome.duration
    sys.stdout.write(fileio.format_series_csv(series))
    print(f"total_ever_infected={total} duration={duration}", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config_text = Path(args.config).read_text()
    cfg = experiments.parse_config(config_text)
    output = _out_path(args.output or cfg.output_path)
    if args.server:
        body = _http_json(
            f"{args.server}/sweeps", {"config_text": config_text, "workers": args.workers}
        )
        job_id = body["job_id"]
        while True:
            status = _http_json(f"{args.server}/sweeps/{job_id}")
            if status["state"] == "done":
                break
            if status["state"] == "failed":
                raise EpisimError(f"sweep job failed: {status.get('error')}")
            time.sleep(args.poll_interval)
        csv_text = _http_text(f"{args.server}/sweeps/{job_id}/records.csv")
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(csv_text)
        records = experiments.parse_records(csv_text)
    else:
        cache_dir = args.cache_dir or experiments.default_cache_dir()
        records = experiments.run_sweep(cfg, cache_dir=cache_dir, workers=args.workers)
        experiments.write_records(records, output)
    print(f"wrote {len(records)} records to {output}")
    return 0


def _cmd_report(args) -> int:
    csv_text = Path(args.input).read_text()
    if args.server:
        body = _http_json(
            f"{args.server}/report",
            {
                "csv_text": csv_text,
                "threshold": args.threshold,
                "nodes": args.nodes,
                "seed_fraction": args.seed_fraction,
            },
        )
        sys.stdout.write(body["csv_text"])
        return 0
    records = experiments.parse_records(csv_text)
    summaries = experiments.summarize_deaths(
        records,
        node_count=args.nodes,
        seed_fraction=args.seed_fraction,
        threshold=args.threshold,
    )
    sys.stdout.write(experiments.format_deaths(summaries))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="episim",
        description="Community-structured epidemic benchmarks and immunization experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a benchmark network with communities")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--avg-degree", type=float, required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--mu", type=float, required=True, help="target mixing fraction")
    p.add_argument("--gamma", type=float, default=3.0, help="degree exponent")
    p.add_argument("--beta", type=float, default=2.0, help="community size exponent")
    p.add_argument("--c-min", type=int, required=True)
    p.add_argument("--c-max", type=int, required=True)
    p.add_argument("--mixing-tolerance", type=float, default=0.02)
    p.add_argument("--max-rewire-sweeps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--server", help="delegate to a running service")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("rank", help="emit an immunization plan as CSV")
    p.add_argument("--strategy", required=True, choices=_STRATEGY_NAMES)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--edges", required=True)
    p.add_argument("--communities")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic strategies")
    p.add_argument("--recalc-interval", type=int, default=1)
    p.add_argument("--server")
    p.set_defaults(handler=_cmd_rank)

    p = sub.add_parser("simulate", help="run one epidemic and emit its time series")
    p.add_argument("--edges", required=True)
    p.add_argument("--plan", help="optional plan CSV applied before seeding")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--initial-infected-fraction", type=float, default=0.01)
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--update-rule", choices=UPDATE_RULES, default="snapshot")
    p.add_argument("--server")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep", help="run the full experiment grid from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output", help="override the config's output_path")
    p.add_argument("--workers", type=int, default=0)
    p.add_argument("--cache-dir", help="network/plan cache directory")
    p.add_argument("--poll-interval", type=float, default=1.0)
    p.add_argument("--server")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("report", help="outbreak-death fractions from a sweep CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=float, default=0.01)
    p.add_argument("--nodes", type=int, default=7500)
    p.add_argument("--seed-fraction", type=float, default=0.01)
    p.add_argument("--server")
    p.set_defaults(handler=_cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except EpisimError as exc:
        print(f"episim: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"episim: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

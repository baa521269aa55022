"""Pipeline driver: network stream, worker fan-out, summary and report files."""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from itertools import islice
from pathlib import Path
from typing import Callable, Iterator

from zonet.network.core import ReactionNetwork
from zonet.network.enumeration import enumerate_networks, sample_networks
from zonet.pipeline.config import PipelineConfig
from zonet.pipeline.inputs import load_network_source
from zonet.pipeline.search import STAGES, NetworkVerdictRecord, analyze_for_pipeline

SCHEMA_VERSION = "zonet.pipeline/1"

log = logging.getLogger(__name__)


def pipeline_networks(cfg: PipelineConfig) -> Iterator[ReactionNetwork]:
    if cfg.networks:
        nets: Iterator[ReactionNetwork] = (load_network_source(src, cfg.base_dir) for src in cfg.networks)
    elif cfg.subsample is not None:
        nets = iter(sample_networks(cfg.species, cfg.reactions, cfg.subsample, cfg.filter_set, seed=cfg.seed))
    else:
        nets = enumerate_networks(cfg.species, cfg.reactions, cfg.filter_set)
    if cfg.limit is not None:
        nets = islice(nets, cfg.limit)
    return nets


def _job(args) -> NetworkVerdictRecord:
    index, net, cfg = args
    return analyze_for_pipeline(index, net, cfg)


def iter_records(cfg: PipelineConfig) -> Iterator[NetworkVerdictRecord]:
    """Records in input order, whatever the worker count."""
    jobs = ((i, net, cfg) for i, net in enumerate(pipeline_networks(cfg)))
    workers = cfg.effective_workers()
    if workers == 1:
        for job in jobs:
            yield _job(job)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_job, jobs, chunksize=4)


@dataclass
class PipelineReport:
    config: PipelineConfig
    records: list[NetworkVerdictRecord]
    summary: dict
    finished_at: str

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "finished_at": self.finished_at,
            "config": self.config.to_json(),
            "summary": self.summary,
            "records": [r.to_json() for r in self.records],
        }


def summarize(cfg: PipelineConfig, records: list[NetworkVerdictRecord]) -> dict:
    """Counts per stage; deterministic for a fixed seed and config."""
    stages = {stage: 0 for stage in STAGES}
    for r in records:
        stages[r.stage] += 1
    best_nondeg = max((r.witness["nondegenerate"] for r in records if r.witness), default=0)
    best_stable = max((r.witness["stable"] for r in records if r.witness), default=0)
    return {
        "schema": SCHEMA_VERSION,
        "source": "inputs" if cfg.networks else ("subsample" if cfg.subsample is not None else "enumeration"),
        "filters": cfg.filter_set.describe() if not cfg.networks else None,
        "networks": len(records),
        "stages": stages,
        "multistationary_networks": sorted(r.canonical for r in records if r.stage in ("multistationary", "multistable")),
        "multistable_networks": sorted(r.canonical for r in records if r.stage == "multistable"),
        "max_nondegenerate_at_one_kappa": best_nondeg,
        "max_stable_at_one_kappa": best_stable,
        "networks_with_violations": sum(1 for r in records if r.violations),
        "kappa_samples": sum(r.diagnostics.get("samples", 0) for r in records),
        "multistationary_count_is_lower_bound": True,
    }


def run_pipeline(
    cfg: PipelineConfig,
    on_record: Callable[[NetworkVerdictRecord], None] | None = None,
) -> PipelineReport:
    records = []
    for rec in iter_records(cfg):
        records.append(rec)
        if on_record is not None:
            on_record(rec)
        log.debug("network %d: %s", rec.index, rec.stage)
    report = PipelineReport(cfg, records, summarize(cfg, records), datetime.now(timezone.utc).isoformat(timespec="seconds"))
    if cfg.output_json:
        write_json(report, cfg.resolve(cfg.output_json))
    if cfg.output_csv:
        write_csv(records, cfg.resolve(cfg.output_csv))
    return report


def write_json(report: PipelineReport, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_json(), indent=1) + "\n")


CSV_COLUMNS = (
    "index", "network", "canonical", "stage", "rank", "t", "theta", "b_terms",
    "sign_verdict", "injectivity", "samples", "nondegenerate", "stable", "witness_kappa",
    "violations", "elapsed_seconds",
)


def write_csv(records: list[NetworkVerdictRecord], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in records:
            d = r.diagnostics
            wit = r.witness or {}
            w.writerow([
                r.index, r.network, r.canonical, r.stage, r.rank, d.get("t", ""), d.get("theta", ""),
                d.get("b_terms", ""), d.get("sign_verdict", ""), d.get("injectivity", ""), d.get("samples", 0),
                wit.get("nondegenerate", 0), wit.get("stable", 0), " ".join(wit.get("kappa", [])),
                " ".join(r.violations), r.elapsed_seconds,
            ])

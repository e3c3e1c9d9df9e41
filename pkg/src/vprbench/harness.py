"""Benchmark orchestration.

Reference images are described once up front (the mapped reference
database).  Each query then goes through three timed phases, load, encode
and match, while a background sampler records CPU and memory.  Retrieval
time ``t_R`` is the mean over queries of the three phases summed.
"""

import logging
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .cohog import CohogParams, cohog_describe
from .dataset import ingest_external_descriptors, load_dataset
from .errors import ConfigError, EmptyWindow, InvalidParam
from .hog import HogParams, hog_describe
from .imaging import DEFAULT_RESOLUTION, load_image, resize
from .matching import check_kinds, evaluate_matches, score_row
from .report import BenchmarkReport
from .rmf import RmfParams, evaluate_rmf
from .telemetry import PHASES, PhaseTimer, ResourceSampler, ingest_power_log, window_energy

log = logging.getLogger(__name__)

TECHNIQUES = ("hog", "cohog", "external")


@dataclass
class RunConfig:
    technique: str
    dataset: str
    gt: str = None
    resolution: tuple = DEFAULT_RESOLUTION
    hog: HogParams = field(default_factory=HogParams)
    cohog: CohogParams = field(default_factory=CohogParams)
    desc: str = None
    ref_desc: str = None
    fps: float = 50.0
    k: float = 1.0
    frames_per_meter: float = 10.0
    velocity: float = 2.0
    tolerance: int = 0
    workers: int = 1
    interval: float = 0.1
    power_log: str = None
    power_clock_offset_s: float = 0.0
    out: str = None
    format: str = "json"

    def validate(self):
        if self.technique not in TECHNIQUES:
            raise ConfigError(f"technique must be one of {TECHNIQUES}, got {self.technique!r}")
        w, h = self.resolution
        if w < 2 or h < 2:
            raise ConfigError(f"resolution {w}x{h} is too small")
        if self.technique == "hog":
            self.hog.grid(w, h)
        if self.technique == "cohog":
            if w % self.cohog.region_size or h % self.cohog.region_size:
                raise ConfigError(f"region size {self.cohog.region_size} does not divide {w}x{h}")
        if self.technique == "external" and (self.desc is None or self.ref_desc is None):
            raise ConfigError("technique 'external' needs both --desc and --ref-desc")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.interval < 0.01:
            raise ConfigError("telemetry interval must be >= 0.01 s")
        if self.tolerance < 0:
            raise ConfigError("ground-truth tolerance must be >= 0")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.format!r}")
        # positivity of F, K, D, V
        RmfParams(F=self.fps, K=self.k, D=self.frames_per_meter, V=self.velocity)
        for p in (self.dataset, self.gt, self.desc, self.ref_desc, self.power_log):
            if p is not None and not Path(p).exists():
                raise ConfigError(f"path does not exist: {p}")

    def echo(self):
        """JSON-ready copy of the configuration, as embedded in reports."""
        d = {
            "technique": self.technique,
            "dataset": str(self.dataset),
            "gt": None if self.gt is None else str(self.gt),
            "resolution": list(self.resolution),
            "tolerance": self.tolerance,
            "workers": self.workers,
            "telemetry_interval_s": self.interval,
            "rmf": {"F": self.fps, "K": self.k, "D": self.frames_per_meter, "V": self.velocity},
            "power_log": None if self.power_log is None else str(self.power_log),
            "power_clock_offset_s": self.power_clock_offset_s,
            "kernel_backend": _kernels.BACKEND,
        }
        if self.technique == "hog":
            d["params"] = asdict(self.hog)
        elif self.technique == "cohog":
            d["params"] = self.cohog.to_dict()
        else:
            d["params"] = {"desc": str(self.desc), "ref_desc": str(self.ref_desc)}
        return d


class _Technique:
    """Per-run describe/match pair."""

    def __init__(self, config, dataset):
        self.config = config
        w, h = config.resolution
        if config.technique == "hog":
            self.metric = "cosine"
            self._describe = lambda img: hog_describe(img, config.hog)
        elif config.technique == "cohog":
            self.metric = "regional"
            self._describe = lambda img: cohog_describe(img, config.cohog)
        else:
            self.queries, qm = ingest_external_descriptors(config.desc, dataset.n_queries)
            self.refs, rm = ingest_external_descriptors(config.ref_desc, dataset.n_refs)
            if qm != rm:
                raise InvalidParam(f"query descriptors use {qm!r}, references use {rm!r}")
            self.metric = qm
        self._size = (w, h)

    @property
    def external(self):
        return self.config.technique == "external"

    def load(self, path, index, is_query=True):
        if self.external:
            return (self.queries if is_query else self.refs)[index]
        img = load_image(path)
        return resize(img, *self._size)

    def describe(self, loaded):
        return loaded if self.external else self._describe(loaded)


def _power_section(trace, timer, map_window, offset):
    def entry(t0, t1):
        try:
            avg, energy = window_energy(trace, t0, t1)
        except EmptyWindow:
            return None
        return {"avg_w": avg, "energy_j": energy}

    by_phase = {}
    for label in PHASES:
        recs = [r for r in timer.records if r.label == label]
        parts = [entry(r.t_start, r.t_end) for r in recs]
        if not recs or any(p is None for p in parts):
            by_phase[label] = None
            continue
        energy = sum(p["energy_j"] for p in parts)
        duration = sum(r.duration for r in recs)
        by_phase[label] = {"avg_w": energy / duration if duration > 0 else parts[0]["avg_w"], "energy_j": energy}
    per_query = []
    queries = sorted({r.query for r in timer.records if r.query >= 0})
    for q in queries:
        recs = [r for r in timer.records if r.query == q]
        per_query.append({"query": q, **(entry(recs[0].t_start, recs[-1].t_end) or {"avg_w": None, "energy_j": None})})
    run = entry(timer.records[0].t_start, timer.records[-1].t_end)
    return {
        "clock_offset_s": offset,
        "n_samples": len(trace),
        "run": run,
        "map_build": entry(*map_window),
        "by_phase": by_phase,
        "per_query": per_query,
    }


def _now():
    return datetime.now(timezone.utc).isoformat()


def run_benchmark(config):
    """Run one benchmark and return its :class:`BenchmarkReport`."""
    config.validate()
    started = _now()
    dataset = load_dataset(config.dataset, config.gt, config.tolerance)
    tech = _Technique(config, dataset)
    notes = []
    power = None
    if config.power_log is not None:
        power = ingest_power_log(config.power_log, config.power_clock_offset_s)

    timer = PhaseTimer()
    sampler = ResourceSampler(os.getpid(), config.interval)
    sampler.start()
    try:
        # reference map: built once, excluded from t_R
        timer.begin("map_build")
        def encode_ref(i):
            return tech.describe(tech.load(dataset.ref_paths[i], i, is_query=False))
        if config.workers > 1:
            with ThreadPoolExecutor(config.workers) as pool:
                refs = list(pool.map(encode_ref, range(dataset.n_refs)))
        else:
            refs = [encode_ref(i) for i in range(dataset.n_refs)]
        map_rec = timer.end()
        check_kinds(refs, tech.metric)

        rows = []
        for q, path in enumerate(dataset.query_paths):
            timer.begin("load", q)
            loaded = tech.load(path, q)
            timer.end()
            timer.begin("encode", q)
            desc = tech.describe(loaded)
            timer.end()
            timer.begin("match", q)
            rows.append(score_row(desc, refs, tech.metric))
            timer.end()
    finally:
        trace = sampler.stop()

    scores = np.vstack(rows)
    outcome = evaluate_matches(scores, dataset.ground_truth)
    query_recs = [r for r in timer.records if r.label in PHASES]
    times = [0.0] * dataset.n_queries
    for r in query_recs:
        times[r.query] += r.duration
    mean_t = statistics.fmean(times)
    if mean_t <= 0:
        raise InvalidParam("measured retrieval time is zero; clock resolution too coarse")
    rmf = evaluate_rmf(
        outcome.matches_list,
        RmfParams(F=config.fps, K=config.k, D=config.frames_per_meter, V=config.velocity, t_R=mean_t),
    )
    if rmf.vpr_rate_unfloored:
        notes.append(f"VPR frame rate floor(1/t_R) is 0 (t_R={mean_t:.3f} s); G uses the unfloored rate")
    if config.technique == "cohog":
        notes.append("CoHOG image score: unweighted mean of per-query-region best cosine")

    power_section = None
    if power is not None:
        power_section = _power_section(power, timer, (map_rec.t_start, map_rec.t_end), config.power_clock_offset_s)
        if any(v is None for v in power_section["by_phase"].values()) or power_section["run"] is None:
            notes.append("power log does not cover every phase; uncovered entries are null")

    return BenchmarkReport(
        tool_version=__version__,
        started_at=started,
        finished_at=_now(),
        config=config.echo(),
        dataset={
            "name": dataset.name,
            "n_queries": dataset.n_queries,
            "n_refs": dataset.n_refs,
            "query_files": [p.name for p in dataset.query_paths],
            "ref_files": [p.name for p in dataset.ref_paths],
        },
        map_build_s=map_rec.duration,
        phases=query_recs,
        processing_times=times,
        mean_processing_s=mean_t,
        median_processing_s=statistics.median(times),
        best_indices=outcome.best_indices,
        gt_indices=list(dataset.ground_truth.mapping),
        matches_list=outcome.matches_list,
        accuracy=outcome.accuracy,
        rmf=rmf,
        resources=trace.summary(),
        power=power_section,
        notes=notes,
    )

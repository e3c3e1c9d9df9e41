"""Benchmark report: schema, JSON/CSV emission and self-consistency checks."""

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import FormatError, IoError, NotFound
from .rmf import RmfParams, RmfResult, evaluate_rmf
from .telemetry import PHASES, PhaseRecord, ResourceSummary

SCHEMA = "vprbench-report/1"


@dataclass
class BenchmarkReport:
    tool_version: str
    started_at: str
    finished_at: str
    config: dict
    dataset: dict
    map_build_s: float
    phases: list
    processing_times: list
    mean_processing_s: float
    median_processing_s: float
    best_indices: list
    gt_indices: list
    matches_list: list
    accuracy: float
    rmf: RmfResult
    resources: ResourceSummary
    power: dict = None
    notes: list = field(default_factory=list)
    schema: str = SCHEMA

    @property
    def n_queries(self):
        return len(self.matches_list)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        if d.get("schema") != SCHEMA:
            raise FormatError(f"unsupported report schema {d.get('schema')!r}")
        d = dict(d)
        d["phases"] = [PhaseRecord(**p) for p in d["phases"]]
        d["rmf"] = RmfResult(**d["rmf"])
        d["resources"] = ResourceSummary(**d["resources"])
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise FormatError(f"unknown report fields {sorted(unknown)}")
        return cls(**d)

    def phase_durations(self, query):
        return {p.label: p.duration for p in self.phases if p.query == query and p.label in PHASES}


def rmf_params_from_config(config, t_R):
    r = config["rmf"]
    return RmfParams(F=r["F"], K=r["K"], D=r["D"], V=r["V"], t_R=t_R)


def recompute(report):
    """Accuracy and RMF fields rebuilt from the report's own matches list and mean t_R."""
    m = report.matches_list
    res = evaluate_rmf(m, rmf_params_from_config(report.config, report.mean_processing_s))
    return {
        "accuracy": sum(m) / len(m),
        "M_q": res.M_q,
        "G": res.G,
        "RMF": res.RMF,
        "N_q": res.N_q,
        "vpr_rate": res.vpr_rate,
        "incoming_rate": res.incoming_rate,
    }


def check_consistency(report):
    """Names of stored fields that disagree with :func:`recompute` (empty if consistent)."""
    fresh = recompute(report)
    bad = []
    if fresh["accuracy"] != report.accuracy:
        bad.append("accuracy")
    for key in ("M_q", "G", "RMF", "N_q", "vpr_rate", "incoming_rate"):
        if fresh[key] != getattr(report.rmf, key):
            bad.append(key)
    return bad


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise FormatError(f"non-finite value {obj!r} cannot be written to JSON")
    return obj


CSV_COLUMNS = (
    "query_index", "query_file", "best_index", "gt_index", "match",
    "load_s", "encode_s", "match_s", "total_s", "avg_power_w", "energy_j",
)


def csv_rows(report):
    per_query_power = {}
    if report.power:
        for entry in report.power.get("per_query", []):
            per_query_power[entry["query"]] = entry
    files = report.dataset.get("query_files", [])
    for i in range(report.n_queries):
        d = report.phase_durations(i)
        pw = per_query_power.get(i) or {}
        yield {
            "query_index": i,
            "query_file": files[i] if i < len(files) else "",
            "best_index": report.best_indices[i],
            "gt_index": report.gt_indices[i],
            "match": report.matches_list[i],
            "load_s": d.get("load", ""),
            "encode_s": d.get("encode", ""),
            "match_s": d.get("match", ""),
            "total_s": report.processing_times[i],
            "avg_power_w": "" if pw.get("avg_w") is None else pw["avg_w"],
            "energy_j": "" if pw.get("energy_j") is None else pw["energy_j"],
        }


def emit_report(report, path, format="json"):
    path = Path(path)
    try:
        if format == "json":
            text = json.dumps(report.to_dict(), indent=2, default=_json_safe, allow_nan=False)
            path.write_text(text + "\n")
        elif format == "csv":
            with path.open("w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
                w.writeheader()
                w.writerows(csv_rows(report))
        else:
            raise FormatError(f"unknown report format {format!r}")
    except OSError as exc:
        raise IoError(f"cannot write report to {path}: {exc}") from exc
    return path


def read_report(path):
    path = Path(path)
    if not path.is_file():
        raise NotFound(f"no such report: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    return BenchmarkReport.from_dict(data)


def _fmt(v, spec=".2f"):
    return "-" if v is None else format(v, spec)


def summary_table(report):
    """Plain-text summary laid out like a CPU / memory / time results table."""
    res = report.resources
    r = report.rmf
    lines = [
        f"technique   {report.config.get('technique')}",
        f"dataset     {report.dataset.get('name')} ({report.dataset.get('n_queries')} queries, "
        f"{report.dataset.get('n_refs')} refs)",
        f"resolution  {report.config.get('resolution')}",
        "",
        f"{'CPU %':>8} {'Mem %':>8} {'SysMem %':>9} {'Time s':>8} {'Median s':>9} {'Acc %':>7} "
        f"{'G':>4} {'M_q':>5} {'RMF':>5} {'Avg W':>7} {'Energy J':>9}",
    ]
    run_power = (report.power or {}).get("run") or {}
    lines.append(
        f"{_fmt(res.cpu_mean):>8} {_fmt(res.mem_mean):>8} {_fmt(res.sys_mem_mean):>9} "
        f"{report.mean_processing_s:>8.4f} {report.median_processing_s:>9.4f} "
        f"{report.accuracy * 100:>7.2f} {r.G:>4} {r.M_q:>5} {r.RMF:>5} "
        f"{_fmt(run_power.get('avg_w'), '.3f'):>7} {_fmt(run_power.get('energy_j'), '.3f'):>9}"
    )
    lines.append("")
    lines.append(
        f"incoming {r.incoming_rate:g} fps, VPR {r.vpr_rate} fps"
        + (f" (unfloored {r.vpr_rate_effective:.3f})" if r.vpr_rate_unfloored else "")
        + f", map build {report.map_build_s:.3f} s"
    )
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines)

import json
import threading

import numpy as np
import pytest

from vprbench import harness, telemetry
from vprbench.dataset import write_external_descriptors, write_ground_truth
from vprbench.errors import AlignmentError, ConfigError, GroundTruthError
from vprbench.harness import RunConfig, run_benchmark
from vprbench.report import check_consistency, recompute
from vprbench.synthetic import make_dataset


def cfg(ds, technique="hog", **kw):
    kw.setdefault("resolution", (64, 64))
    kw.setdefault("interval", 0.02)
    return RunConfig(technique=technique, dataset=str(ds), **kw)


@pytest.mark.parametrize("technique", ["hog", "cohog"])
def test_self_match(small_dataset, technique):
    report = run_benchmark(cfg(small_dataset, technique, velocity=0.01))
    assert report.accuracy == 1.0
    assert report.rmf.G == 1
    assert report.rmf.RMF == report.rmf.M_q == report.rmf.N_q == 10
    assert check_consistency(report) == []


def test_deterministic_matching(tmp_path):
    ds = make_dataset(tmp_path / "p", n=6, size=(64, 64), identical=False)
    a = run_benchmark(cfg(ds))
    b = run_benchmark(cfg(ds))
    assert a.matches_list == b.matches_list
    assert a.best_indices == b.best_indices
    assert a.accuracy == b.accuracy


def test_phase_order_and_times(small_dataset):
    r = run_benchmark(cfg(small_dataset))
    assert len(r.phases) == 3 * 10
    for q in range(10):
        recs = [p for p in r.phases if p.query == q]
        assert [p.label for p in recs] == ["load", "encode", "match"]
        assert recs[0].t_end <= recs[1].t_start and recs[1].t_end <= recs[2].t_start
        assert r.processing_times[q] == pytest.approx(sum(p.duration for p in recs), abs=1e-12)
    assert r.mean_processing_s == pytest.approx(np.mean(r.processing_times))
    assert r.median_processing_s == pytest.approx(np.median(r.processing_times))


def test_reference_map_built_once(small_dataset, monkeypatch):
    calls = []
    real = harness.hog_describe

    def counting(img, params):
        calls.append(1)
        return real(img, params)

    monkeypatch.setattr(harness, "hog_describe", counting)
    r = run_benchmark(cfg(small_dataset))
    assert len(calls) == r.dataset["n_refs"] + r.dataset["n_queries"]


def test_workers(small_dataset):
    r = run_benchmark(cfg(small_dataset, workers=3))
    assert r.accuracy == 1.0


def test_g_from_slow_retrieval(small_dataset, monkeypatch):
    # main-thread clock advances 0.12 s per reading: three phases = 0.36 s per query
    real = telemetry.clock
    state = {"t": 1000.0}
    main = threading.main_thread()

    def fake():
        if threading.current_thread() is not main:
            return real()
        state["t"] += 0.12
        return state["t"]

    monkeypatch.setattr(telemetry, "clock", fake)
    r = run_benchmark(cfg(small_dataset, fps=50, frames_per_meter=100, velocity=2))
    assert r.mean_processing_s == pytest.approx(0.36)
    assert r.rmf.incoming_rate == 50
    assert r.rmf.vpr_rate == 2
    assert r.rmf.G == 25


def test_external_descriptors(tmp_path, rng):
    ds = make_dataset(tmp_path / "e", n=4, size=(32, 32))
    refs = rng.normal(size=(4, 16))
    queries = refs[[2, 0, 1, 3]] + 0.01
    write_external_descriptors(queries, "l1", tmp_path / "q.desc")
    write_external_descriptors(refs, "l1", tmp_path / "r.desc")
    write_ground_truth([2, 0, 1, 3], ds / "ground_truth.csv")
    r = run_benchmark(cfg(ds, "external", desc=str(tmp_path / "q.desc"), ref_desc=str(tmp_path / "r.desc")))
    assert r.best_indices == [2, 0, 1, 3]
    assert r.accuracy == 1.0
    write_external_descriptors(queries[:3], "l1", tmp_path / "q3.desc")
    with pytest.raises(AlignmentError):
        run_benchmark(cfg(ds, "external", desc=str(tmp_path / "q3.desc"), ref_desc=str(tmp_path / "r.desc")))


def test_external_needs_files(small_dataset):
    with pytest.raises(ConfigError):
        run_benchmark(cfg(small_dataset, "external"))


@pytest.mark.parametrize(
    "kw",
    [
        dict(technique="sift"),
        dict(resolution=(60, 64)),
        dict(workers=0),
        dict(fps=0),
        dict(format="xml"),
        dict(power_log="/nonexistent/power.csv"),
    ],
)
def test_config_errors(small_dataset, kw):
    technique = kw.pop("technique", "hog")
    with pytest.raises(ConfigError):
        run_benchmark(cfg(small_dataset, technique, **kw))


def test_bad_ground_truth_aborts(small_dataset):
    write_ground_truth([0] * 9 + [50], small_dataset / "ground_truth.csv")
    with pytest.raises(GroundTruthError):
        run_benchmark(cfg(small_dataset))


def test_power_section(small_dataset, tmp_path):
    # a flat 3 W log spanning the whole benchmark clock range
    now = telemetry.clock()
    log = tmp_path / "power.csv"
    log.write_text("timestamp_ms,voltage_mV,current_mA,power_mW\n0,5000,600,3000\n600000,5000,600,3000\n")
    r = run_benchmark(cfg(small_dataset, power_log=str(log), power_clock_offset_s=now - 300.0))
    p = r.power
    assert p["run"]["avg_w"] == pytest.approx(3.0)
    for label in ("load", "encode", "match"):
        assert p["by_phase"][label]["avg_w"] == pytest.approx(3.0)
    assert len(p["per_query"]) == 10
    assert p["map_build"]["energy_j"] == pytest.approx(3.0 * r.map_build_s, rel=1e-6)


def test_power_log_not_covering_run(small_dataset, tmp_path):
    log = tmp_path / "power.csv"
    log.write_text("timestamp_ms,voltage_mV,current_mA,power_mW\n0,5000,600,3000\n1000,5000,600,3000\n")
    r = run_benchmark(cfg(small_dataset, power_log=str(log), power_clock_offset_s=-1e6))
    assert r.power["run"] is None
    assert any("power log" in n for n in r.notes)


def test_recompute_matches(small_dataset):
    r = run_benchmark(cfg(small_dataset, "cohog"))
    fresh = recompute(r)
    assert fresh["accuracy"] == r.accuracy
    assert (fresh["G"], fresh["RMF"], fresh["M_q"]) == (r.rmf.G, r.rmf.RMF, r.rmf.M_q)
    json.dumps(r.to_dict())

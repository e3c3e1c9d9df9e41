import json

import pytest

from vprbench.cli import main
from vprbench.dataset import write_ground_truth
from vprbench.synthetic import make_dataset


@pytest.fixture
def ds(tmp_path):
    return make_dataset(tmp_path / "ds", n=4, size=(64, 64))


def test_run_json_and_report(ds, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["run", "--technique", "hog", "--dataset", str(ds), "--gt", str(ds / "ground_truth.csv"),
                 "--resolution", "64x64", "--fps", "50", "--k", "1", "--frames-per-meter", "10",
                 "--velocity", "2", "--workers", "1", "--out", str(out), "--format", "json"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["accuracy"] == 1.0
    assert data["config"]["resolution"] == [64, 64]
    assert main(["report", "--in", str(out), "--summary"]) == 0
    assert "Acc %" in capsys.readouterr().out
    assert main(["report", "--in", str(out), "--check"]) == 0


def test_run_csv(ds, tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", "--technique", "cohog", "--dataset", str(ds), "--resolution", "64x64",
                 "--out", str(out), "--format", "csv"]) == 0
    assert len(out.read_text().strip().splitlines()) == 5


def test_config_file_and_power(ds, tmp_path):
    log = tmp_path / "p.csv"
    log.write_text("timestamp_ms,voltage_mV,current_mA,power_mW\n0,,,1000\n1000,,,1000\n")
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"technique": "hog", "dataset": str(ds), "resolution": [64, 64],
                                "power_log": str(log), "power_clock_offset_s": -5.0}))
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(conf), "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["config"]["power_clock_offset_s"] == -5.0
    assert data["power"] is not None


def test_rmf_command(tmp_path, capsys):
    f = tmp_path / "m.txt"
    f.write_text("1 1 0 1\n1 1")
    assert main(["rmf", "--matches", str(f), "--g", "2"]) == 0
    assert json.loads(capsys.readouterr().out) == {"N_q": 6, "M_q": 5, "G": 2, "RMF": 4}
    f.write_text(json.dumps({"matches_list": [0, 1, 1, 0]}))
    assert main(["rmf", "--matches", str(f), "--g", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["RMF"] == 1


def test_exit_codes(ds, tmp_path):
    # config error
    assert main(["run", "--technique", "hog", "--dataset", str(tmp_path / "nope")]) == 2
    assert main(["run", "--technique", "hog", "--dataset", str(ds), "--resolution", "60x64"]) == 2
    assert main(["run", "--dataset", str(ds)]) == 2
    assert main(["rmf", "--matches", str(tmp_path / "m"), "--g", "0"]) == 3
    f = tmp_path / "m.txt"
    f.write_text("1 0 1")
    assert main(["rmf", "--matches", str(f), "--g", "0"]) == 2
    # data error
    write_ground_truth([0, 1, 2, 9], ds / "ground_truth.csv")
    assert main(["run", "--technique", "hog", "--dataset", str(ds), "--resolution", "64x64"]) == 3
    f.write_text("1 2 1")
    assert main(["rmf", "--matches", str(f), "--g", "1"]) == 3


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as e:
        main(["run", "--technique", "sift"])
    assert e.value.code == 2


def test_synth(tmp_path):
    assert main(["synth", "--out", str(tmp_path / "s"), "-n", "3", "--resolution", "32x32"]) == 0
    assert len(list((tmp_path / "s" / "query").iterdir())) == 3

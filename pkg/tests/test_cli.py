import csv
import json
import subprocess
import sys

import pytest

from mwsplan.cli import main, parse_scenarios
from mwsplan.txchain import sws_reference_osnr


def test_osnr_sweep(capsys):
    main(["osnr", "--scheme", "joint", "--axis", "ocnr", "--start", "30", "--stop", "32", "--step", "1"])
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["axis_value", "osnr_tx_db", "scheme"]
    assert [r[0] for r in rows[1:]] == ["30", "31", "32"]
    assert all(r[2] == "joint" for r in rows[1:])


def test_osnr_sws_default_point(capsys):
    main(["osnr", "--scheme", "sws", "--ocnr", "55", "--p-line", "16"])
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 2
    assert float(rows[1].split(",")[1]) == pytest.approx(sws_reference_osnr(), abs=1e-6)


def test_osnr_architecture_flags(capsys):
    main(["osnr", "--scheme", "sws", "--insertion-loss", "13"])
    better = float(capsys.readouterr().out.splitlines()[1].split(",")[1])
    main(["osnr", "--scheme", "sws"])
    base = float(capsys.readouterr().out.splitlines()[1].split(",")[1])
    assert better > base


def test_qot(capsys):
    main(["qot", "--spans", "6", "--sr", "35", "--modulation", "QPSK", "--osnr-tx", "36"])
    out = dict(line.split("=", 1) for line in capsys.readouterr().out.split()
               if "=" in line)
    assert float(out["achieved_snr_db"]) == pytest.approx(18.113, abs=1e-3)
    assert float(out["required_snr_db"]) == pytest.approx(6.163, abs=1e-3)
    assert out["feasible"] == "yes"


def test_qot_infeasible(capsys):
    main(["qot", "--spans", "40", "--sr", "140", "--modulation", "64QAM"])
    assert "feasible=no" in capsys.readouterr().out


def test_plan(tmp_path, capsys):
    topo = tmp_path / "t.json"
    topo.write_text(json.dumps({"nodes": [{"id": "A", "weight": 1}, {"id": "B", "weight": 1}],
                                "links": [{"a": "A", "b": "B", "length_km": 80}]}))
    demands = tmp_path / "d.csv"
    demands.write_text("src,dst,gbps\nA,B,2000\n")
    out = tmp_path / "plan.csv"
    main(["plan", str(topo), str(demands), "--scenario", "fixed", "--penalty-db", "1", "-o", str(out)])
    rows = out.read_text().splitlines()
    assert rows[0] == "src,dst,path,config,slots,snr_db,source_type"
    assert len(rows) == 4
    assert "blocks=1" in rows[-1] and "lasers=1" in rows[-1]


def test_plan_bundled_to_stdout(tmp_path, capsys):
    demands = tmp_path / "d.csv"
    demands.write_text("Hamburg,Muenchen,800\n")
    main(["plan", "germany", str(demands)])
    assert capsys.readouterr().out.splitlines()[1].startswith("Hamburg,Muenchen,")


def test_plan_rejects_sws_penalty(tmp_path):
    demands = tmp_path / "d.csv"
    demands.write_text("Hamburg,Muenchen,800\n")
    with pytest.raises(SystemExit):
        main(["plan", "germany", str(demands), "--penalty-db", "2"])


def test_sweep_outputs(tmp_path):
    main(["sweep", "--topology", "germany", "--art-min", "10000", "--art-max", "20000", "--art-step", "10000",
          "--scenarios", "sws,flex:3", "--penalty-grid", "0,3", "--out-dir", str(tmp_path)])
    results = list(csv.DictReader((tmp_path / "results.csv").open()))
    assert [(r["scenario"], float(r["art_gbps"])) for r in results] == [
        ("sws", 10000.0), ("sws", 20000.0), ("flex_3dB", 10000.0), ("flex_3dB", 20000.0)]
    penalty = list(csv.DictReader((tmp_path / "penalty.csv").open()))
    assert [float(r["penalty_db"]) for r in penalty] == [0.0, 3.0]


def test_sweep_weights_and_seed(tmp_path):
    w = tmp_path / "w.csv"
    w.write_text("node,weight\nBerlin,50\n")
    args = ["sweep", "--art-max", "10000", "--scenarios", "sws", "--penalty-grid", "0"]
    main(args + ["--weights", str(w), "--out-dir", str(tmp_path / "a")])
    main(args + ["--out-dir", str(tmp_path / "b")])
    main(args + ["--random-weights", "--seed", "3", "--out-dir", str(tmp_path / "c")])
    main(args + ["--random-weights", "--seed", "3", "--out-dir", str(tmp_path / "d")])
    read = lambda d: (tmp_path / d / "results.csv").read_bytes()
    assert read("a") != read("b")
    assert read("c") == read("d")


def test_parse_scenarios():
    scs = parse_scenarios("sws, flex:2.5,fixed")
    assert [s.label for s in scs] == ["sws", "flex_2.5dB", "fixed_1dB_150GHz"]
    with pytest.raises(Exception):
        parse_scenarios("mesh")


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mwsplan.cli", "qot", "--spans", "1", "--sr", "70",
                           "--modulation", "16QAM"], capture_output=True, text=True, check=True)
    assert "feasible=yes" in proc.stdout

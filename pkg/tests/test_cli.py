"""
CLI 測試：各子命令的輸入輸出與錯誤碼
"""
import json
import logging

import pandas as pd

from main import main
from services.graph_service import load_edge_list


def read_json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_generate_writes_edge_list(tmp_path):
    out = tmp_path / "rt.txt"
    assert main(["generate", "--model", "rt", "--n", "10", "--degree", "3", "--seed", "1", "--out", str(out)]) == 0
    graph = load_edge_list(out.read_text(encoding="utf-8"))
    assert graph.n == 10
    assert graph.num_edges == 9


def test_generate_stats(tmp_path, capsys):
    out = tmp_path / "ba.txt"
    assert main(["generate", "--model", "ba", "--n", "30", "--m", "2", "--out", str(out), "--stats"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["nodes"] == 30
    assert stats["edges"] == 56


def test_generate_invalid_spec_exits_2():
    assert main(["generate", "--model", "rt", "--n", "10"]) == 2


def test_wan_weights(tmp_path, capsys):
    seats = tmp_path / "seats.txt"
    seats.write_text("0 1 20\n1 2 1\n", encoding="utf-8")
    assert main(["wan-weights", "--alpha", "0.7", "--theta", "0.05", "--input", str(seats)]) == 0
    assert capsys.readouterr().out == "0 1 2\n1 2 29\n"


def test_wan_weights_file_io_is_logged(tmp_path, caplog):
    seats = tmp_path / "seats.txt"
    seats.write_text("0 1 20\n1 2 1\n", encoding="utf-8")
    out = tmp_path / "weights.txt"
    with caplog.at_level(logging.INFO, logger="sourceloc"):
        assert main(["wan-weights", "--input", str(seats), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == "0 1 2\n1 2 29\n"
    assert f"[IO] READ {seats} - SUCCESS" in caplog.text
    assert f"[IO] WRITE {out} - SUCCESS" in caplog.text


def test_kdrs(tmp_path, capsys):
    graph = tmp_path / "p3.txt"
    graph.write_text("5 6\n6 7\n", encoding="utf-8")
    assert main(["kdrs", "--graph", str(graph), "--k", "2"]) == 0
    assert read_json(capsys) == {"set": [5, 7], "classes": 3, "n": 3}
    assert main(["kdrs", "--graph", str(graph), "--dmd", "--exact"]) == 0
    assert read_json(capsys)["dmd"] == 2


def test_simulate_then_localize_with_verification(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    trace = tmp_path / "trace.csv"
    result = tmp_path / "result.json"
    assert main(["generate", "--model", "er", "--n", "25", "--p", "0.25", "--seed", "3", "--out", str(graph)]) == 0
    assert main(["simulate", "--graph", str(graph), "--source", "4", "--eps", "0.2", "--seed", "9", "--out", str(trace)]) == 0
    capsys.readouterr()

    code = main([
        "localize", "--graph", str(graph), "--trace", str(trace), "--static", "0,1",
        "--gain", "size", "--kd", "inf", "--eps", "0.2", "--verify", "--out", str(result),
    ])
    assert code == 0
    payload = read_json(capsys)
    assert payload["candidates"] == [4]
    assert payload["localized"] is True
    assert payload["verified"] is True
    assert payload["sensors"][:2] == [0, 1]
    assert json.loads(result.read_text(encoding="utf-8")) == payload


def test_localize_unknown_label_exits_2(tmp_path):
    graph = tmp_path / "p3.txt"
    graph.write_text("0 1\n1 2\n", encoding="utf-8")
    trace = tmp_path / "trace.csv"
    assert main(["simulate", "--graph", str(graph), "--source", "9", "--out", str(trace)]) == 2


def test_experiment(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({
        "graphs": [{"model": "rt", "n": 40, "degree": 3}],
        "trials": 2,
        "gains": ["size", "drs"],
        "k_d": "inf",
    }), encoding="utf-8")
    out = tmp_path / "results.csv"
    summary = tmp_path / "summary.csv"
    history = tmp_path / "history.csv"
    assert main([
        "experiment", "--config", str(config), "--out", str(out),
        "--summary", str(summary), "--history", str(history), "--workers", "2",
    ]) == 0
    rows = pd.read_csv(out)
    assert len(rows) == 4
    assert rows["localized"].all()
    assert len(pd.read_csv(summary)) == 2
    curves = pd.read_csv(history)
    assert list(curves.columns) == ["graph", "eps", "delta", "gain", "trial", "step", "candidates"]
    assert set(curves["gain"]) == {"size", "drs"}


def test_experiment_bad_config_exits_2(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"graphs": [{"model": "rt", "n": 40, "degree": 3}], "k_s": 1}), encoding="utf-8")
    assert main(["experiment", "--config", str(config), "--out", str(tmp_path / "r.csv")]) == 2

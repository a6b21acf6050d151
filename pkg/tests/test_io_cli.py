import csv
import io
import json

import numpy as np
import pytest

from gblab import AsymmetricWeight, Cochain0, Cochain1, Section, dary_tree, delta, grid, ray
from gblab.cli import main, parse_radii
from gblab.io import (
    CSV_COLUMNS,
    CSV_HEADER,
    ParseError,
    cochain_from_dict,
    cochain_to_dict,
    dump_graph,
    graph_to_dict,
    load_graph,
    probe_csv_text,
    section_from_dict,
    section_to_dict,
)
from gblab.lab import ProbeReport
from oracles import random_graph


def _read_csv(text):
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    return list(csv.DictReader(lines[1:]))


def test_graph_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for g in [random_graph(rng, 20, frontier_frac=0.2), dary_tree(2, 3), grid(2, 4)]:
        path = tmp_path / "g.json"
        dump_graph(g, path)
        h = load_graph(path)
        assert np.array_equal(g.c, h.c) and np.array_equal(g.r, h.r)
        assert np.array_equal(g.tail, h.tail) and np.array_equal(g.head, h.head)
        assert np.array_equal(g.frontier, h.frontier)
        assert list(g.labels) == list(h.labels) and g.origin == h.origin


def test_load_graph_field_errors(tmp_path):
    base = {"vertices": [{"id": 0, "c": 1}, {"id": 1, "c": 1}], "edges": [{"u": 0, "v": 1, "r": 1}]}
    assert load_graph(base).n_edges == 1
    bad = json.loads(json.dumps(base))
    bad["edges"][0]["v"] = 7
    with pytest.raises(ParseError, match=r"edges\[0\]\.v"):
        load_graph(bad)
    bad = json.loads(json.dumps(base))
    del bad["vertices"][1]["c"]
    with pytest.raises(ParseError, match=r"vertices\[1\]"):
        load_graph(bad)
    asym = json.loads(json.dumps(base))
    asym["edges"].append({"u": 1, "v": 0, "r": 2})
    with pytest.raises(AsymmetricWeight):
        load_graph(asym)
    empty = tmp_path / "empty.json"
    empty.write_text("")
    with pytest.raises(ParseError):
        load_graph(empty)
    broken = tmp_path / "broken.json"
    broken.write_text('{"vertices": [\n  {"id": 0,, "c": 1}]}')
    with pytest.raises(ParseError, match=r"broken.json:2:"):
        load_graph(broken)


def test_cochain_and_section_round_trip():
    rng = np.random.default_rng(1)
    g = random_graph(rng, 15)
    vals = rng.standard_normal(g.n_edges)
    vals[::3] = 0.0
    phi = Cochain1(g, vals)
    data = json.loads(json.dumps(cochain_to_dict(phi)))
    assert len(data["entries"]) == np.count_nonzero(vals)
    assert np.array_equal(cochain_from_dict(g, data).values, vals)
    s = Section(Cochain0(g, rng.standard_normal(15)), phi)
    t = section_from_dict(g, json.loads(json.dumps(section_to_dict(s))))
    assert np.array_equal(t.f.values, s.f.values) and np.array_equal(t.phi.values, s.phi.values)


def test_csv_layout():
    rows = [{"family": "ray", "radius": 4, "M": 2, "C": 0.5, "kernel_dim": 0, "slope": float("nan"),
             "verdict": "PASS", "wall_ms": 3.25}]
    text = probe_csv_text(rows)
    parsed = _read_csv(text)
    assert tuple(parsed[0].keys()) == CSV_COLUMNS
    assert parsed[0]["wall_ms"] == "" and parsed[0]["C"] == "0.5" and parsed[0]["slope"] == "nan"
    assert _read_csv(probe_csv_text(rows, timing=True))[0]["wall_ms"] == "3.25"


def test_parse_radii():
    assert parse_radii("3..6") == [3, 4, 5, 6]
    assert parse_radii("2,5,9") == [2, 5, 9]
    assert parse_radii([4, 8]) == [4, 8]
    for bad in ("", "5..3", "a..b", "3,3", "0..2"):
        with pytest.raises(ParseError):
            parse_radii(bad)


def test_cli_probe_triadic(tmp_path, capsys):
    out, js = tmp_path / "p.csv", tmp_path / "p.json"
    assert main(["probe", "--family", "triadic", "--radii", "3..8", "--out", str(out), "--json", str(js)]) == 0
    rows = _read_csv(out.read_text())
    assert [r["verdict"] for r in rows] == ["FAIL"] * 6
    assert abs(float(rows[0]["slope"]) + 0.5) < 0.1
    payload = json.loads(js.read_text())
    assert payload["format"] == "gblab-probe-json v1"
    # the stored witness reproduces C when read back
    rep0 = payload["reports"][-1]
    g = dary_tree(2, rep0["radius"])
    s = section_from_dict(g, rep0["witness"])
    rep = ProbeReport(family="triadic", radius=rep0["radius"], K=np.array(rep0["K"]),
                      U=g.region(rep0["U"]["vertices"], rep0["U"]["edges"]), C=rep0["C"],
                      kernel_dim=rep0["kernel_dim"], kernel_hit=rep0["kernel_hit"], witness=s,
                      convention=rep0["convention"])
    assert abs(rep.recheck() - rep0["C"]) < 1e-8


def test_cli_probe_graph_file(tmp_path, capsys):
    path = tmp_path / "ray.json"
    data = graph_to_dict(ray(12))
    path.write_text(json.dumps(data))
    assert main(["probe", "--graph-file", str(path), "--u-rule", "vertex", "--u-distance", "4"]) == 0
    rows = _read_csv(capsys.readouterr().out)
    assert abs(float(rows[0]["C"]) - 0.5) < 1e-10


def test_cli_asymmetric_graph_file_fails(tmp_path, capsys):
    path = tmp_path / "asym.json"
    path.write_text(json.dumps({"vertices": [{"id": "a", "c": 1}, {"id": "b", "c": 1}],
                                "edges": [{"u": "a", "v": "b", "r": 1}, {"u": "b", "v": "a", "r": 3}]}))
    assert main(["probe", "--graph-file", str(path)]) == 1
    assert "reverse orientation" in capsys.readouterr().err
    path.write_text("")
    assert main(["probe", "--graph-file", str(path)]) == 1


def test_cli_probe_capacity_and_kernel(capsys):
    assert main(["probe", "--family", "zline", "--probe", "capacity", "--radii", "1,2,4,8"]) == 0
    rows = _read_csv(capsys.readouterr().out)
    assert [float(r["C"]) for r in rows] == pytest.approx([2.0, 1.0, 0.5, 0.25], abs=1e-10)
    assert main(["probe", "--family", "grid2", "--probe", "kernel", "--radii", "5,7"]) == 0
    rows = _read_csv(capsys.readouterr().out)
    assert all(int(r["kernel_dim"]) > 0 and r["verdict"] == "FAIL" for r in rows)


def test_cli_identities(capsys):
    assert main(["identities", "--family", "grid2", "--radii", "4..5", "--trials", "5"]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1].split()[1] == "pass"


def test_cli_witness_triadic_and_kernels(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["witness", "--family", "triadic", "--M", "6", "--out", str(out)]) == 0
    w = json.loads(out.read_text())
    assert abs(w["ratio"] - 0.125) < 1e-12
    g = dary_tree(2, w["radius"])
    phi = cochain_from_dict(g, w["cochain"])
    assert abs(np.linalg.norm(delta(phi).values * np.sqrt(g.c)) ** 2 - 2.0**-5) < 1e-12

    assert main(["witness", "--family", "grid2", "--kind", "kernel", "--radius", "9", "--out", str(out)]) == 0
    w = json.loads(out.read_text())
    assert w["dimension"] >= 1 and w["max_abs_delta"] < 1e-12
    assert main(["witness", "--family", "tree", "--kind", "kernel", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["dimension"] == 0


def test_cli_insufficient_depth(capsys):
    assert main(["witness", "--family", "triadic", "--M", "6", "--radius", "5"]) == 1
    assert "needs depth >= 8" in capsys.readouterr().err


def test_cli_threads_env_and_config(tmp_path, monkeypatch, capsys):
    args = ["probe", "--family", "star-like", "--radii", "4..7"]
    assert main(args) == 0
    serial = capsys.readouterr().out
    monkeypatch.setenv("GBLAB_THREADS", "3")
    assert main(args) == 0
    assert capsys.readouterr().out == serial
    monkeypatch.setenv("GBLAB_THREADS", "many")
    assert main(args) == 1
    monkeypatch.delenv("GBLAB_THREADS")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"family": "star-like", "radii": "4..7", "threads": 2}))
    assert main(["probe", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out == serial
    cfg.write_text(json.dumps({"family": "star-like", "bogus": 1}))
    assert main(["probe", "--config", str(cfg)]) == 1
    assert "bogus" in capsys.readouterr().err


def test_cli_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["probe", "--family", "moebius"])
    assert info.value.code == 2


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "gblab", "probe", "--family", "ray", "--radii", "4,6"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith(CSV_HEADER)


def test_stdin_free_output_buffer():
    # csv text must be parseable by the csv module as-is
    text = probe_csv_text([])
    assert list(csv.reader(io.StringIO(text)))[1] == list(CSV_COLUMNS)

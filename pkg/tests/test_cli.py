import pytest
import sys, os
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import csv
import io
import json

from cli import OutputRecord, main, render_csv, render_text
from constants import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE
from quadvol.correlators import CACHE_FILE_NAME, load_cache
from quadvol.exact_arith import DIVERGENT, PiMonomial
from quadvol.stable_graphs import StableGraph, canonical_encoding


def run(capsys, *argv):
    code = main([*argv, "--no-cache"])
    out, err = capsys.readouterr()
    return code, out, err


def encode(graph):
    return canonical_encoding(graph).decode()


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def test_record_decimal_comes_from_exact_value():
    rec = OutputRecord("x", PiMonomial(2, 2), "test")
    assert rec.decimal(6) == "19.7392"
    assert rec.exact_text() == "2*pi^2"


def test_divergent_record():
    rec = OutputRecord("E", DIVERGENT, "test")
    assert rec.decimal(10) == DIVERGENT
    assert "E = " + DIVERGENT in render_text([rec], 10)


def test_csv_header():
    rows = list(csv.reader(io.StringIO(render_csv([OutputRecord("x", 3, "test")], 5))))
    assert rows == [["quantity", "exact", "decimal", "provenance"], ["x", "3", "3", "test"]]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def test_volume_json_by_cylinders(capsys):
    code, out, _ = run(capsys, "volume", "2", "0", "--by-cylinders", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data[0]["quantity"] == "Vol Q_{2,0}"
    assert data[0]["exact"] == {"num": "1", "den": "15", "pi_exp": 6}
    assert data[0]["decimal"].startswith("64.09261290")
    assert [d["exact"]["den"] for d in data[1:]] == ["405", "27", "81"]


def test_volume_convention_note(capsys):
    code, out, _ = run(capsys, "volume", "0", "3")
    assert code == EXIT_OK
    assert out.startswith("Vol Q_{0,3} = 4")
    assert "by convention" in out


def test_volume_by_graph(capsys):
    code, out, _ = run(capsys, "volume", "1", "2", "--by-graph", "--format", "json")
    data = json.loads(out)
    assert len([d for d in data if d["quantity"].startswith("Vol(")]) == 5
    assert all("polynomial" in d["details"] for d in data[1:])


def test_carea_both_methods(capsys):
    code, out, _ = run(capsys, "carea", "2", "0", "--format", "json")
    assert code == EXIT_OK
    data = json.loads(out)
    values = [d["exact"] for d in data if d["quantity"].startswith("pi^2/3")]
    assert values == [{"num": "19", "den": "18"}] * 2
    assert data[-1] == {"quantity": "agree", "exact": True, "decimal": None, "provenance": "siegel_veech.carea"}


def test_lyapunov(capsys):
    code, out, _ = run(capsys, "lyapunov", "2", "0")
    assert out.splitlines()[0].startswith("Lambda+ Q_{2,0} = 4/3")


def test_corr(capsys):
    code, out, _ = run(capsys, "corr", "1", "1")
    assert code == EXIT_OK
    assert out.startswith("<tau_1>_1 = 1/24")


def test_agk_csv(capsys):
    code, out, _ = run(capsys, "agk", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["exact"] for r in rows] == ["1", "3/5", "1"]
    assert rows[1]["decimal"] == "0.6"


def test_graphs_dot(capsys):
    code, out, _ = run(capsys, "graphs", "0", "4", "--dot")
    assert code == EXIT_OK
    assert out.count("graph G") == 2
    assert out.endswith("}\n")


def test_freq_sep_ratio(capsys):
    code, out, _ = run(capsys, "freq", "--sep-ratio", "2")
    assert out.startswith("c(sep)/c(nonsep) g=2 = 1/48")


def test_freq_exceptional_needs_flag(capsys):
    graph = encode(StableGraph((1,), ((),), ((0, 0),)))
    code, _, err = run(capsys, "freq", "--graph", graph)
    assert code == EXIT_DOMAIN
    code, out, _ = run(capsys, "freq", "--graph", graph, "--allow-exceptional")
    assert code == EXIT_OK
    assert "c(gamma) = 1/576" in out


def test_stats_distribution(capsys):
    code, out, _ = run(capsys, "stats", "2", "0", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["exact"] for r in rows] == ["7/27", "5/9", "5/27", "52/27"]


def test_stats_bounded_heights(capsys):
    graph = encode(StableGraph((0, 1), ((), ()), ((0, 0), (0, 1))))
    code, out, _ = run(capsys, "stats", "--graph", graph, "--bound", "1")
    assert out.startswith("P(heights <= 1) = 540*pi^-6")


def test_stats_fixed_heights(capsys):
    graph = encode(StableGraph((0,), ((),), ((0, 0), (0, 0))))
    code, out, _ = run(capsys, "stats", "--graph", graph, "--moment", "e1/e2", "--heights", "2,2")
    assert code == EXIT_OK
    assert "= 7/3" in out


def test_stats_height_one(capsys):
    code, out, _ = run(capsys, "stats", "2", "0", "--height-one")
    assert "945*pi^-6" in out


# ---------------------------------------------------------------------------
# Exit codes and determinism
# ---------------------------------------------------------------------------

def test_unstable_type_is_a_domain_error(capsys):
    code, out, err = run(capsys, "volume", "0", "2")
    assert code == EXIT_DOMAIN
    assert out == ""
    assert "quadvol:" in err


@pytest.mark.parametrize("graph", ["g:2;l:;e:", "g:0;l:;e:0-0"])
def test_stats_rejects_graphs_without_cylinders(capsys, graph):
    code, out, err = run(capsys, "stats", "--graph", graph, "--bound", "1")
    assert code == EXIT_DOMAIN
    assert out == ""
    assert "quadvol:" in err


def test_usage_errors_exit_with_two():
    with pytest.raises(SystemExit) as exc:
        main(["volume"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["corr", "1", "1", "--digits", "0"])
    assert exc.value.code == EXIT_USAGE


def test_output_is_deterministic(capsys):
    first = run(capsys, "volume", "1", "3", "--by-graph", "--format", "json")
    second = run(capsys, "volume", "1", "3", "--by-graph", "--format", "json", "--workers", "3")
    assert first[:2] == second[:2]


def test_bad_worker_env_is_ignored(capsys, monkeypatch):
    monkeypatch.setenv("QUADVOL_WORKERS", "many")
    code, out, _ = run(capsys, "corr", "0", "0", "0", "0")
    assert code == EXIT_OK
    assert out.startswith("<tau_0 tau_0 tau_0>_0 = 1")


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------

def test_cache_is_written(capsys, tmp_path):
    code = main(["corr", "2", "4", "--cache-dir", str(tmp_path)])
    capsys.readouterr()
    assert code == EXIT_OK
    loaded = load_cache(tmp_path / CACHE_FILE_NAME)
    assert loaded.status == "loaded"
    assert len(loaded.entries) > 0


def test_corrupt_cache_is_rebuilt(capsys, tmp_path):
    main(["corr", "1", "1", "--cache-dir", str(tmp_path)])
    capsys.readouterr()
    path = tmp_path / CACHE_FILE_NAME
    path.write_bytes(path.read_bytes().replace(b"1/24", b"1/2\xe9"))
    code = main(["corr", "1", "1", "--cache-dir", str(tmp_path)])
    out, _ = capsys.readouterr()
    assert code == EXIT_OK
    assert out.startswith("<tau_1>_1 = 1/24")
    assert load_cache(path).status == "loaded"


def test_no_cache_writes_nothing(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("QUADVOL_CACHE_DIR", str(tmp_path))
    run(capsys, "corr", "1", "1")
    assert not (tmp_path / CACHE_FILE_NAME).exists()

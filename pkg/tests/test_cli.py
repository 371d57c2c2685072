import io
import json
import subprocess
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from grg.arena import parse_game, serialize_game
from grg.cli import main
from grg.reductions import random_game


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def fig1_path(data_dir):
    return data_dir / "fig1.grg"


def test_solve_fig1(fig1_path):
    code, out, _ = run("solve", fig1_path)
    assert code == 0
    assert out.splitlines()[:2] == ["winner adam", "algo chain"]


def test_text_output_is_deterministic(fig1_path):
    assert run("solve", fig1_path) == run("solve", fig1_path)
    assert "micros" not in run("max", fig1_path)[1]


@pytest.mark.parametrize("argv, code", [
    (["solve", "fig1.grg", "--algo", "one-large"], 3),
    (["solve", "fig1.grg", "--algo", "adam"], 3),
    (["max", "fig1.grg", "--algo", "eve-scc"], 3),
    (["solve", "missing.grg"], 2),
    (["promise", "fig1-adam.grg", "--k", "1"], 1),
    (["promise", "fig1-adam.grg", "--k", "0"], 0),
    (["max", "fig1.grg", "--k", "2"], 0),
    (["max", "fig1.grg", "--k", "3"], 1),
    (["gen", "--vertices", "0"], 2),
    (["gen", "--vertices", "3", "--edges", "20"], 2),
    (["reduce", "cnf", "phi1.qdimacs"], 2),
    (["reduce", "st-reach", "h3.graph"], 2),
])
def test_exit_codes(data_dir, monkeypatch, argv, code):
    monkeypatch.chdir(data_dir)
    assert run(*argv)[0] == code


def test_parse_error_exit(tmp_path):
    bad = tmp_path / "bad.grg"
    bad.write_text("grg 1\nvertex 0 E\n")
    code, _, err = run("solve", bad)
    assert code == 2
    assert "line 2" in err


def test_budget_exit(tmp_path, monkeypatch):
    g = random_game(10, 30, 0, 3, 3, seed=1)
    path = tmp_path / "g.grg"
    path.write_text(serialize_game(g))
    monkeypatch.setenv("GRG_MEMORY_MB", "0")
    assert run("solve", path, "--algo", "product")[0] == 4
    monkeypatch.delenv("GRG_MEMORY_MB")
    big = random_game(16, 40, 8, seed=1)
    path.write_text(serialize_game(big))
    assert run("solve", path, "--check")[0] == 4


@pytest.mark.parametrize("command", ["solve", "max", "promise"])
@pytest.mark.parametrize("name", ["fig1.grg", "fig1-adam.grg"])
def test_json_matches_text(data_dir, command, name):
    _, text, _ = run(command, data_dir / name, "--check")
    code, js, _ = run(command, data_dir / name, "--check", "--json")
    assert code == 0
    report = json.loads(js)
    assert {"command", "file", "algo", "witness", "micros", "states"} <= report.keys()
    first = text.splitlines()[0]
    if command == "solve":
        assert first == f"winner {report['winner']}"
    else:
        assert first == f"value {report['value']}"
    assert f"algo {report['algo']}" in text
    assert report["check"] == "ok"


def test_promise_witness(fig1_path):
    _, out, _ = run("promise", fig1_path)
    assert "witness promised {v}" in out


def test_oracle_command(fig1_path):
    code, out, _ = run("oracle", fig1_path)
    assert code == 0
    assert out.splitlines() == ["winner adam", "max 2", "promise 1"]
    _, js, _ = run("oracle", fig1_path, "--problem", "max", "--json")
    assert json.loads(js) == {"max": 2}


def test_full_witness_flag(tmp_path):
    g = random_game(12, 30, 3, 2, 3, seed=5)
    path = tmp_path / "g.grg"
    path.write_text(serialize_game(g))
    _, short, _ = run("solve", path, "--algo", "product", "--json")
    _, full, _ = run("solve", path, "--algo", "product", "--json", "--full-witness")
    short, full = json.loads(short), json.loads(full)
    assert short["winner"] == full["winner"]
    assert len(short["witness"]["moves"]) <= 50
    assert len(full["witness"]["moves"]) == full["witness"]["size"]


def test_reduce_outputs(data_dir, tmp_path):
    code, out, _ = run("reduce", "qbf", data_dir / "phi1.qdimacs")
    assert code == 0
    assert parse_game(out).arena.vertex_count == 13
    _, out, _ = run("reduce", "st-reach", data_dir / "h3.graph", "--source", 1, "--sink", 3)
    assert parse_game(out).arena.vertex_count == 14
    target = tmp_path / "k3.grg"
    run("reduce", "vertex-cover", data_dir / "k3.graph", "-o", target)
    assert parse_game(target.read_text()).arena.vertex_count == 6
    assert "# label: e1-2" in target.read_text()
    assert run("max", target)[1].splitlines()[0] == "value 2"
    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 2 2\n1 2 0\n-1 2 0\n")
    _, out, _ = run("reduce", "cnf", cnf, "--owner", "eve")
    assert out == run("reduce", "cnf", cnf, "--owner", "eve")[1]


def test_gen_is_deterministic():
    argv = ["gen", "--vertices", 8, "--targets", 3, "--seed", 7]
    first, second = run(*argv), run(*argv)
    assert first[0] == 0 and first == second
    assert parse_game(first[1]).arena.vertex_count == 8


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    for i in range(500):
        g = random_game(3 + i % 8, None, i % 4, (i // 4) % 3, 2, seed=i,
                        profile=("two", "eve", "adam")[i % 3])
        (root / f"g{i:03d}.grg").write_text(serialize_game(g))
    return root


def test_bench_check(corpus):
    code, out, _ = run("bench", corpus, "--check")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 501
    assert all("check ok" in line for line in lines[:-1])
    assert lines[-1].startswith("summary files 500 ")
    assert "mismatches 0" in lines[-1]


def test_bench_jobs_keep_order(corpus):
    def verdicts(*extra):
        _, out, _ = run("bench", corpus, "--json", *extra)
        rows = [json.loads(line) for line in out.splitlines()]
        return [(r["file"], r["winner"], r["algo"]) for r in rows[:-1]], rows[-1]["summary"]

    serial, summary = verdicts()
    parallel, summary2 = verdicts("--jobs", "3")
    assert serial == parallel
    assert summary["algorithms"] == summary2["algorithms"]


def test_bench_reports_bad_files(tmp_path):
    (tmp_path / "a.grg").write_text("grg 1\nvertex 0 E 0\nstart 0\n")
    (tmp_path / "b.grg").write_text("nonsense\n")
    code, out, _ = run("bench", tmp_path)
    assert code == 2
    assert "error" in out.splitlines()[1]


def test_console_script_entry_point(fig1_path):
    proc = subprocess.run([sys.executable, "-m", "grg.cli", "solve", str(fig1_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("winner adam")

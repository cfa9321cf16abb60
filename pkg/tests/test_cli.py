from __future__ import annotations

import io
import json

import pytest

from mancalog.cli import main

from conftest import fixture_path

NET = fixture_path("social_network.json")


def run(*argv, env_workers=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_run_canonical_row():
    code, out, err = run("run", NET, fixture_path("running_canonical.mcl"), "--canonical", "--sparse")
    assert code == 0
    assert '1,node:2,watchesB,"[0.0,0.2]"' in out.splitlines()
    stats = json.loads(err.split("stats: ", 1)[1].splitlines()[0])
    assert stats["gamma_star_runs"] == 11


def test_run_json_and_out_file(tmp_path):
    target = tmp_path / "t.json"
    code, out, _ = run("run", NET, fixture_path("f7.mcl"), "--format", "json", "--sparse", "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["t_max"] == 10 and len(doc["rows"]) == 11


def test_run_inconsistent_reports_witnesses(tmp_path):
    prog = tmp_path / "clash.mcl"
    prog.write_text("fact watchesA:[0,0.2] @ node 1 in [0,0]; fact watchesA:[0.8,1] @ node 1 in [0,0];")
    code, _, err = run("run", NET, str(prog))
    assert code == 2
    assert "witness: t=0 node:1 watchesA empty" in err


def test_malformed_program():
    code, _, err = run("run", NET, fixture_path("malformed.mcl"))
    assert code == 1
    assert "malformed.mcl:2:33: syntax:" in err


def test_usage_errors():
    assert run()[0] == 1
    assert run("run", NET)[0] == 1
    assert run("entail", NET, fixture_path("f7.mcl"))[0] == 1
    assert run("run", NET, "/nonexistent.mcl")[0] == 1


@pytest.mark.parametrize(
    "fact, code, answer",
    [
        ("watchesA:[0.8,1] @ node 1 in [0,0]", 0, "true"),
        ("watchesA:[0.9,1] @ node 1 in [0,0]", 3, "false"),
    ],
)
def test_entail(fact, code, answer):
    got, out, _ = run("entail", NET, fixture_path("f7.mcl"), "--fact", fact)
    assert (got, out.strip()) == (code, answer)


def test_entail_edge_cases():
    code, out, _ = run("entail", NET, fixture_path("full_program.mcl"), "--fact", "watchesA:[0.8,1] @ node 1 in [0,0]")
    assert (code, out.strip()) == (2, "inconsistent-program")
    assert run("entail", NET, fixture_path("f7.mcl"), "--fact", "watchesA @ node 1")[0] == 1
    assert run("entail", NET, fixture_path("f7.mcl"), "--fact", "watchesA:[0,1] @ node 9 in [0,0]")[0] == 1
    code, out, _ = run(
        "entail", NET, fixture_path("running_canonical.mcl"), "--canonical", "--fact", "watchesB:[0,0.2] @ node 2 in [1,1]"
    )
    assert (code, out.strip()) == (0, "true")


def test_check_and_validate():
    assert run("check", NET, fixture_path("f7_r2.mcl"))[:2] == (0, "consistent\n")
    assert run("check", NET, fixture_path("full_program.mcl"))[:2] == (2, "inconsistent\n")
    assert run("validate", NET, fixture_path("full_program.mcl"))[:2] == (0, "valid\n")


def test_output_independent_of_workers(monkeypatch):
    import mancalog.engine as engine

    monkeypatch.setattr(engine, "PARALLEL_MIN_CELLS", 1)
    outputs = set()
    for w in ("1", "2", "4"):
        code, out, err = run("run", NET, fixture_path("full_program_literal.mcl"), "--canonical", "--workers", w)
        stats = json.loads(err.split("stats: ", 1)[1].splitlines()[0])
        stats.pop("wall_time")
        outputs.add((code, out, json.dumps(stats, sort_keys=True)))
    assert len(outputs) == 1


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv("MANCALOG_WORKERS", "2")
    assert run("check", NET, fixture_path("f7.mcl"))[0] == 0
    monkeypatch.setenv("MANCALOG_WORKERS", "lots")
    assert run("check", NET, fixture_path("f7.mcl"))[0] == 1


def test_gen_is_deterministic(tmp_path):
    files = []
    for k in range(2):
        net, prog = tmp_path / f"n{k}.json", tmp_path / f"p{k}.mcl"
        args = ("gen", str(net), str(prog), "--seed", "42", "--nodes", "100", "--degree", "4", "--tmax", "10", "--rules", "5")
        assert run(*args)[0] == 0
        files.append((net.read_bytes(), prog.read_bytes()))
    assert files[0] == files[1]
    assert run("validate", str(tmp_path / "n0.json"), str(tmp_path / "p0.mcl"))[:2] == (0, "valid\n")


def test_gen_rejects_impossible_degree(tmp_path):
    code, _, err = run("gen", str(tmp_path / "n.json"), str(tmp_path / "p.mcl"), "--nodes", "10", "--degree", "20")
    assert code == 1 and "degree" in err


def test_bench_report(tmp_path):
    code, out, _ = run("bench", "--sizes", "40,80", "--repetitions", "3", "--tmax", "4", "--rules", "4")
    assert code == 0
    report = json.loads(out)
    assert report["all_within_bound"]
    first, second = report["sizes"]
    assert [len(first["runs"]), len(second["runs"])] == [3, 3]
    assert set(first["wall_time"]) == {"min", "median", "max"}
    assert first["growth_factor"] is None and second["edge_factor"] == 2.0
    assert run("bench", "--sizes", "0")[0] == 1

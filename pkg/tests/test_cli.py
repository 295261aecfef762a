"""End-to-end runs of the ifcomp command line."""

import json
import subprocess
import sys

import pytest

from ifcomp.info_core import FunctionTable, constant_function

RUN = [sys.executable, "-m", "ifcomp.cli"]


def run_cli(*args, expect=0):
    proc = subprocess.run(RUN + list(args), capture_output=True, text=True)
    assert proc.returncode == expect, proc.stderr
    return proc


def write_problem(path, kind, problem, version="1"):
    path.write_text(json.dumps(
        {"version": version, "kind": kind, "problem": problem}))
    return str(path)


def ident_x():
    return FunctionTable((2, 2), 2, [0, 0, 1, 1]).to_json()


def test_info_runs_and_lists_subcommands():
    proc = run_cli("info")
    report = json.loads(proc.stdout)
    assert report["kind"] == "info"
    assert "sumrate" in report["subcommands"]
    assert report["limits"]["bruteforce_max_messages"] == 2


def test_sumrate_bruteforce_certifies(tmp_path):
    problem = {
        "pmf": {"generator": "dsbs", "p": 0.3},
        "f_A": constant_function((2, 2)).to_json(),
        "f_B": ident_x(),
        "t": 1,
    }
    path = write_problem(tmp_path / "p.json", "sumrate", problem)
    report = json.loads(run_cli("sumrate", "--input", path).stdout)
    res = report["results"]
    assert res["feasible"] is True
    assert res["certified"] is True
    assert res["achieved"] == pytest.approx(0.881290899231, abs=1e-9)
    assert report["notes"]["method"] == "bruteforce"
    assert report["inputs"]["t"] == 1


def test_sumrate_seed_flag_overrides_problem_seed(tmp_path):
    problem = {
        "pmf": {"generator": "dsbs", "p": 0.3},
        "f_A": constant_function((2, 2)).to_json(),
        "f_B": ident_x(),
        "t": 3,
        "seed": 11,
    }
    path = write_problem(tmp_path / "p.json", "sumrate", problem)
    report = json.loads(
        run_cli("sumrate", "--input", path, "--seed", "5").stdout)
    assert report["notes"]["seed"] == 5
    assert report["results"]["certified"] is True


def test_allocate_reports_ladder(tmp_path):
    problem = {"p": 0.5, "q": 0.5, "partition": "uniform:2"}
    path = write_problem(tmp_path / "p.json", "allocate", problem)
    res = json.loads(run_cli("allocate", "--input", path).stdout)["results"]
    assert res["sum"] == pytest.approx(1.5, abs=1e-9)
    assert res["closed_form"] == pytest.approx(1.360673760222, abs=1e-9)
    assert res["bound"] == pytest.approx(1.311278124459, abs=1e-9)
    assert res["sum"] >= res["integral"] >= res["closed_form"] - 1e-9


def test_network_detects_scheme(tmp_path):
    problem = {
        "nodes": 3,
        "edges": [[1, 3], [2, 3]],
        "joint": {"axes": [2, 2, 1], "probs": [0.375, 0.125, 0.125, 0.375]},
        "functions": {"3": FunctionTable((2, 2, 1), 2, [0, 1, 1, 0]).to_json()},
    }
    path = write_problem(tmp_path / "p.json", "network", problem)
    res = json.loads(run_cli("network", "--input", path).stdout)["results"]
    assert res["lp"]["optimum"] == pytest.approx(1.622556248918, abs=1e-9)
    assert "modulo_sum" in res["schemes"]
    assert res["comparisons"]["modulo_sum"]["gap_to_lp"] == pytest.approx(
        0.0, abs=1e-9)
    assert set(res["lp"]["rates"]) == {"1->3", "2->3"}


def test_analyze_reports_structure(tmp_path):
    f_and = FunctionTable((2, 2), 2, [0, 0, 0, 1]).to_json()
    problem = {"pmf": {"generator": "dsbs", "p": 0.3},
               "f_A": f_and, "f_B": f_and}
    path = write_problem(tmp_path / "p.json", "analyze", problem)
    res = json.loads(run_cli("analyze", "--input", path).stdout)["results"]
    assert res["one_message_condition"] is True
    assert res["support_is_rectangle"] is True
    assert res["zero_message_structure"]["violations"]


def test_paper_examples_table_is_deterministic():
    first = run_cli("paper-examples").stdout
    second = run_cli("paper-examples").stdout
    assert first == second
    results = json.loads(first)["results"]
    assert results["all_pass"] is True
    rows = {r["name"]: r for r in results["rows"]}
    assert rows["and_fair_bits_two_messages"]["value"] == pytest.approx(
        1.5, abs=1e-9)
    assert rows["product_times_bit_one_message"]["value"] == pytest.approx(
        2.0, abs=1e-9)
    assert all(r["pass"] for r in results["rows"])
    # a bound row records the bound instead of an expected value
    star = rows["star_and_fair_bits_m64"]
    assert star["expected"] is None and star["bound"] is not None


def test_json_reports_are_byte_identical_across_runs(tmp_path):
    problem = {
        "pmf": {"generator": "dsbs", "p": 0.3},
        "f_A": constant_function((2, 2)).to_json(),
        "f_B": ident_x(),
        "t": 3,
    }
    path = write_problem(tmp_path / "p.json", "sumrate", problem)
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    run_cli("sumrate", "--input", path, "--output", str(out1))
    run_cli("sumrate", "--input", path, "--output", str(out2))
    assert out1.read_bytes() == out2.read_bytes()


def test_text_format_carries_wall_time(tmp_path):
    problem = {"p": 0.3, "q": 0.6}
    path = write_problem(tmp_path / "p.json", "allocate", problem)
    proc = run_cli("allocate", "--input", path, "--format", "text")
    assert "wall time:" in proc.stdout
    assert "closed_form:" in proc.stdout


def test_exit_code_2_on_bad_inputs(tmp_path):
    # wrong kind
    path = write_problem(tmp_path / "a.json", "allocate", {"p": 0.3, "q": 0.4})
    proc = run_cli("sumrate", "--input", path, expect=2)
    assert "kind" in proc.stderr
    # missing field
    path = write_problem(tmp_path / "b.json", "allocate", {"p": 0.3})
    proc = run_cli("allocate", "--input", path, expect=2)
    assert "'q'" in proc.stderr
    # malformed JSON
    bad = tmp_path / "c.json"
    bad.write_text("{not json")
    proc = run_cli("allocate", "--input", str(bad), expect=2)
    assert "JSON" in proc.stderr
    # wrong version
    path = write_problem(tmp_path / "d.json", "allocate",
                         {"p": 0.3, "q": 0.4}, version="2")
    proc = run_cli("allocate", "--input", path, expect=2)
    assert "version" in proc.stderr
    # unknown subcommand
    run_cli("frobnicate", expect=2)


def test_exit_code_2_on_domain_violations(tmp_path):
    # probability outside (0, 1)
    path = write_problem(tmp_path / "a.json", "allocate", {"p": 1.5, "q": 0.4})
    run_cli("allocate", "--input", path, expect=2)
    # pmf that does not normalize: the diagnostic cites the invariant
    problem = {
        "pmf": {"axes": [2, 2], "probs": [0.4, 0.2, 0.2, 0.1]},
        "f_A": constant_function((2, 2)).to_json(),
        "f_B": ident_x(),
        "t": 1,
    }
    path = write_problem(tmp_path / "pm.json", "sumrate", problem)
    proc = run_cli("sumrate", "--input", path, expect=2)
    assert "sum to" in proc.stderr
    # function domain mismatched to pmf
    problem = {
        "pmf": {"generator": "dsbs", "p": 0.3},
        "f_A": constant_function((3, 3)).to_json(),
        "f_B": ident_x(),
        "t": 1,
    }
    path = write_problem(tmp_path / "b.json", "sumrate", problem)
    proc = run_cli("sumrate", "--input", path, expect=2)
    assert "f_A" in proc.stderr

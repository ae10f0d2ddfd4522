import json
import subprocess
import sys

import pytest

from gaudin_wronski import cli, sl2rep
from gaudin_wronski.bethe import orbit_distance


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parse_complex():
    assert cli.parse_complex("2") == 2
    assert cli.parse_complex("-1.5i") == -1.5j
    assert cli.parse_complex("1-2i") == 1 - 2j
    assert cli.parse_complex("1e-3+1e2j") == 1e-3 + 100j
    assert cli.parse_complex("-i") == -1j
    with pytest.raises(cli.UsageError):
        cli.parse_complex("x")


def test_dim_sing(capsys):
    code, rep = run(["dim-sing", "--m", "1,1,1,1", "--k", "2", "--exact"], capsys)
    assert code == 0
    assert rep["result"] == {"formula": 2, "bruteforce": 2, "nullspace": 2, "match": True}
    for key in ("schema", "instance", "version", "seed", "tolerances", "timestamp"):
        assert key in rep
    assert rep["schema"] == 1


def test_schubert(capsys):
    code, rep = run(["schubert", "--q", "1,1,1,1", "--d", "3"], capsys)
    assert code == 0 and rep["result"]["formula"] == rep["result"]["cg"] == 2


def test_solve_canonical(capsys):
    code, rep = run(["solve", "--m", "1,1", "--z", "0,1", "--k", "1"], capsys)
    assert code == 0
    (orbit,) = rep["result"]["orbits"]
    assert orbit["t"][0] == pytest.approx([0.5, 0.0], abs=1e-12)
    assert orbit["mu"][0] == pytest.approx([1.5, 0.0])


@pytest.mark.parametrize("cmd", ["verify", "census", "fuchsian"])
def test_checking_commands_pass(cmd, capsys):
    code, rep = run([cmd, "--m", "1,1,1,1", "--z", "0,1,3,-2+i", "--k", "2"], capsys)
    assert code == 0 and rep["passed"]


def test_census_reports_count(capsys):
    code, rep = run(["census", "--m", "2,1,1", "--z", "0,1,2i", "--k", "2"], capsys)
    assert code == 0
    assert rep["result"]["count"] == rep["result"]["schubert_bound"] == 1


def test_under_count_exits_one(capsys):
    code, rep = run(["solve", "--m", "1,1,1,1,1,1", "--z", "0,1,2,3,5,7", "--k", "3",
                     "--max-starts", "1"], capsys)
    assert code == 1
    assert rep["result"]["solver"]["under_count"] is True


@pytest.mark.parametrize("argv", [
    ["solve", "--m", "1,1", "--z", "0,0", "--k", "1"],
    ["solve", "--m", "1,1", "--k", "1"],
    ["solve", "--m", "1,1", "--z", "0,1", "--k", "5"],
    ["schubert", "--q", "1,1", "--d", "3"],
    ["dim-sing", "--m", "a,b", "--k", "1"],
    ["solve", "--m", "1,1", "--z", "0,1", "--k", "1", "--tol", "-1"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_two(argv, capsys):
    assert cli.main(argv) == 2
    assert "usage error" in capsys.readouterr().err


def test_reports_are_deterministic(tmp_path):
    def once(path):
        assert cli.main(["verify", "--m", "2,1,2,1", "--z", "0,1,i,-2", "--k", "3",
                         "--out", str(path)]) == 0
        rep = json.loads(path.read_text())
        rep.pop("timestamp")
        return json.dumps(rep, sort_keys=True)
    assert once(tmp_path / "a.json") == once(tmp_path / "b.json")


def test_seed_changes_starts_not_orbits(capsys):
    argv = ["solve", "--m", "2,1,2,1", "--z", "0,1,i,-2", "--k", "3"]
    _, a = run(argv + ["--seed", "1"], capsys)
    _, b = run(argv + ["--seed", "99"], capsys)
    ta = [[complex(*c) for c in o["t"]] for o in a["result"]["orbits"]]
    tb = [[complex(*c) for c in o["t"]] for o in b["result"]["orbits"]]
    assert len(ta) == len(tb) == sl2rep.dim_sing_formula((2, 1, 2, 1), 3)
    for t in ta:
        assert min(orbit_distance(t, s) for s in tb) < 1e-7


def test_thread_cap_does_not_change_report(tmp_path):
    outs = []
    for threads in ("1", "4"):
        path = tmp_path / f"t{threads}.json"
        subprocess.run([sys.executable, "-m", "gaudin_wronski", "solve", "--m", "2,1,2,1",
                        "--z", "0,1,i,-2", "--k", "3", "--out", str(path)],
                       env={"GW_THREADS": threads, "PATH": ""}, check=True)
        rep = json.loads(path.read_text())
        rep.pop("timestamp")
        outs.append(rep)
    assert outs[0] == outs[1]


def test_selftest_subset(capsys):
    code, rep = run(["selftest", "--criteria", "2,3"], capsys)
    assert code == 0
    assert [c["number"] for c in rep["result"]["criteria"]] == [2, 3]


def test_selftest_detects_injected_fault(monkeypatch, capsys):
    # drop the top component of every pairwise tensor product
    monkeypatch.setattr(sl2rep, "tensor_pair", lambda a, b: range(abs(a - b), a + b - 1, 2))
    sl2rep._decompose.cache_clear()
    try:
        code, rep = run(["selftest", "--criteria", "2"], capsys)
    finally:
        monkeypatch.undo()
        sl2rep._decompose.cache_clear()
    assert code == 1
    assert rep["result"]["criteria"][0]["passed"] is False


def test_run_spec_file_with_flag_override(tmp_path, capsys):
    spec = tmp_path / "run.json"
    spec.write_text(json.dumps({"command": "solve", "m": [1, 1, 1, 1], "z": [0, 1, 3, [-2, 1]],
                                "k": 2, "seed": 5, "max_starts": 1}))
    code, rep = run(["solve", "--spec", str(spec), "--max-starts", "400"], capsys)
    assert code == 0
    assert rep["seed"] == 5 and rep["tolerances"]["max_starts"] == 400
    assert len(rep["result"]["orbits"]) == 2


@pytest.mark.parametrize("content", ['{"m": [1, 1], "z": [0, 1], "k": "one"}',
                                     '{"m": [1, 1], "bogus": 1}', '[1, 2]', 'not json',
                                     '{"command": "census", "m": [1, 1]}'])
def test_bad_run_spec_exits_two(tmp_path, content, capsys):
    spec = tmp_path / "run.json"
    spec.write_text(content)
    assert cli.main(["solve", "--spec", str(spec)]) == 2
    assert "usage error" in capsys.readouterr().err


def test_orbit_csv(tmp_path, capsys):
    path = tmp_path / "orbits.csv"
    code, _ = run(["solve", "--m", "1,1,1,1", "--z", "0,1,3,-2+i", "--k", "2", "--csv", str(path)],
                  capsys)
    assert code == 0
    rows = path.read_text().strip().splitlines()
    assert len(rows) == 3
    assert rows[0].split(",")[:3] == ["orbit", "t1_re", "t1_im"]

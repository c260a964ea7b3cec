import hashlib
import json

import pytest

from dualcube.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    paths = {}
    for name, argv in {"tri": ["generate", "triangle"], "hex2": ["generate", "hex", "--N", 2],
                       "par": ["generate", "parallel"], "chain": ["generate", "roller-chain", "--n", 4],
                       "grid3": ["generate", "grid", "--N", 3]}.items():
        p = tmp_path / f"{name}.json"
        assert run(argv + ["--out", p], capsys)[0] == 0
        paths[name] = p
    return paths


def test_generate(files):
    assert len(json.loads(files["hex2"].read_text())["lines"]) == 15
    assert len(json.loads(files["tri"].read_text())["lines"]) == 3
    doc = json.loads(files["chain"].read_text())
    assert doc["n_pairs"] == 8 and "lines" not in doc


def test_generate_usage_errors(capsys):
    assert run(["generate", "hex"], capsys)[0] == 2
    assert run(["generate", "random", "--n", 4], capsys)[0] == 2
    assert run(["generate", "star-tree", "--n", 2], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["generate", "hex", "--N", "0"])
    assert exc.value.code == 2


def test_generate_is_deterministic(capsys):
    a = run(["generate", "random", "--n", 5, "--seed", 7], capsys)[1]
    b = run(["generate", "random", "--n", 5, "--seed", 7], capsys)[1]
    assert a == b and hashlib.md5(a.encode()).hexdigest() == hashlib.md5(b.encode()).hexdigest()


def test_enumerate_and_export(files, capsys):
    code, out, _ = run(["enumerate", files["tri"]], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["nodes"]) == 8 and len(doc["edges"]) == 12
    assert sorted(n["height"] for n in doc["nodes"]) == [0] * 7 + [1]
    code, dot, _ = run(["export", files["tri"], "--format", "dot"], capsys)
    assert code == 0 and dot.count(" -- ") == 12
    code, svg, _ = run(["export", files["tri"]], capsys)
    assert code == 0 and "<svg" in svg
    assert run(["export", files["chain"], "--format", "svg"], capsys)[0] == 2


def test_budget_exit_code(files, capsys):
    code, out, err = run(["enumerate", files["hex2"], "--budget-vertices", 10], capsys)
    assert code == 3 and "budget" in err
    doc = json.loads(out)
    assert doc["complete"] is False and len(doc["nodes"]) == 10


def test_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(["enumerate", bad], capsys)[0] == 2
    bad.write_text("{not json")
    assert run(["enumerate", bad], capsys)[0] == 2
    bad.write_text(json.dumps({"lines": [[1, 0, 0]], "sides": [1]}))
    assert run(["enumerate", bad], capsys)[0] == 2


def test_check_suites(files, capsys):
    assert run(["check", files["tri"], "--suite", "shadow-lemmas"], capsys)[0] == 0
    assert run(["check", files["chain"], "--suite", "duality-roundtrip"], capsys)[0] == 0
    assert run(["check", files["grid3"], "--suite", "median-axioms"], capsys)[0] == 0
    assert run(["check", files["par"], "--suite", "pwp"], capsys)[0] == 2
    assert run(["check", files["chain"], "--suite", "pwp", "--C", 1], capsys)[0] == 2


def test_pwp_violations_replay(files, tmp_path, capsys):
    out = tmp_path / "v.json"
    assert run(["check", files["par"], "--suite", "pwp", "--C", 2, "--out", out], capsys)[0] == 1
    doc = json.loads(out.read_text())
    assert doc["violations"] and all("reproducer" in v for v in doc["violations"])
    code, rep, _ = run(["check", "--replay", out], capsys)
    rep = json.loads(rep)
    assert code == 1 and rep["reproduced"] == rep["replayed"] == len(doc["violations"])
    assert run(["check", files["par"], "--suite", "pwp", "--C", 5], capsys)[0] == 0


def test_analyze(files, capsys):
    argv = ["analyze", files["hex2"], "--qi", "--samples", 100, "--seed", 1]
    code, a, _ = run(argv, capsys)
    assert code == 0
    _, b, _ = run(argv, capsys)
    assert a == b
    doc = json.loads(a)
    assert doc["qi"]["lambda"] >= 1 and doc["qi"]["epsilon"] >= doc["qi"]["epsilon_sample"]
    assert doc["violations"] == [] and doc["heights"]["0"] == 91
    # hex N=2 has no trusted disk at the default margin
    assert run(["analyze", files["hex2"], "--radii", 1], capsys)[0] == 2
    assert run(["analyze", files["chain"]], capsys)[0] == 2

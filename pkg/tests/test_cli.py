import json
import os

import jsonschema
import pytest

from sigmatorus import __version__
from sigmatorus.cli import JOB_SCHEMA, main, run_job, sweep


def _run(capsys, job, *extra):
    code = main(["run", "--inline", json.dumps(job), *extra])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_modular_example(capsys):
    code, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, -2], [1, 3]], "p": 2}})
    assert code == 0 and rep["verdict"] == "modular"
    assert rep["version"] == __version__ and rep["seed"] == 0
    code, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, -2], [1, 1]], "p": 2}})
    assert rep["verdict"] == "not-modular" and rep["result"]["witnesses"] == [[1, 1]]


def test_classify_and_torsion(capsys):
    code, rep, _ = _run(capsys, {"command": "classify", "params": {"F": [[[[0, -2], [1, 1]]]], "p": 3}})
    assert code == 0 and rep["result"]["trdeg"] == 1
    code, rep, _ = _run(capsys, {"command": "torsion",
                                 "params": {"F": [[[[0, -2], [1, 1]]]], "n": 3, "s": "all"}})
    assert code == 0
    assert [r["order"] for r in rep["result"]["sweep"]] == [1, 3]


def test_recurrence_and_obstruct(capsys):
    code, rep, _ = _run(capsys, {"command": "recurrence", "params": {"A": [[2, 1], [1, 1]], "eps": 1e-4}})
    assert code == 0 and rep["result"]["method"] == "dominant-real"
    code, rep, _ = _run(capsys, {"command": "obstruct", "params": {"f": [[0, -1], [1, -1], [2, 1]], "p": 2}})
    assert code == 0 and rep["verdict"] == "obstructed"


def test_hahn_and_as_reduce(capsys):
    group = {"weights": ["1"], "d": 1}
    field = {"p": 3, "k": 1}
    code, rep, _ = _run(capsys, {"command": "hahn-eval", "params": {
        "op": "invert", "group": group, "field": field,
        "a": {"terms": [[["0"], "1"], [["1"], "2"]]}, "cutoff": 3}})
    assert code == 0 and len(rep["result"]["series"]["terms"]) == 4
    code, rep, _ = _run(capsys, {"command": "as-reduce", "params": {
        "group": group, "field": field, "b": {"terms": [[["-9"], "1"]]}}})
    assert rep["verdict"] == "obstructed"


def test_babbitt(capsys):
    code, rep, _ = _run(capsys, {"command": "babbitt", "params": {
        "mode": "finite", "field": {"p": 2, "k": 1}, "P": [1, 1, 1]}})
    assert code == 0 and rep["verdict"] == "stable"


def test_schema_error_pointer(capsys):
    code, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, 1]], "p": -3}})
    assert code == 1 and rep["pointer"] == "/params/p"
    code, rep, _ = _run(capsys, {"command": "nope", "params": {}})
    assert code == 1 and rep["pointer"] == "/command"


def test_domain_error_exit_code(capsys):
    code, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, 1]], "p": 4}})
    assert code == 1 and "prime" in rep["error"]


def test_malformed_inline(capsys):
    assert main(["run", "--inline", "{not json"]) == 1
    assert "malformed" in json.loads(capsys.readouterr().out)["error"]


def test_inconclusive_exit_code(capsys):
    code, rep, _ = _run(capsys, {"command": "recurrence", "params": {
        "A": [[3, -4], [4, 3]], "eps": 1e-9, "orbit_steps": 50, "samples": 4, "return_horizon": 8}})
    assert code == 2 and rep["verdict"] == "budget-exhausted"


def test_budget_scale_reaches_budgets():
    job = {"command": "obstruct", "params": {"f": [[0, -1], [1, -1], [2, 1]], "p": 2}}
    rep, _ = run_job(job, budget_scale=0.5)
    assert rep["result"]["budgets"]["j_max"] == 6


def test_determinism_and_report_schema(capsys):
    job = {"command": "recurrence", "params": {"A": [[0, "2/3"], [1, 0]], "eps": 1e-4}}
    _, _, a = _run(capsys, job, "--seed", "5")
    _, rep, b = _run(capsys, job, "--seed", "5")
    assert a == b
    # a report's echoed job validates against the job schema
    jsonschema.validate({"command": rep["command"], "params": rep["params"]}, JOB_SCHEMA)


def test_timing_opt_in(capsys):
    _, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, 1], [1, 1]], "p": 2}}, "--timing")
    assert rep["timing_s"] >= 0


def test_figures_written(tmp_path, capsys):
    code, rep, _ = _run(capsys, {"command": "modular", "params": {"f": [[0, -2], [2, 1]], "p": 2}},
                        "--figures", str(tmp_path))
    assert code == 0
    for rel in rep["figures"]:
        path = tmp_path / rel
        assert path.exists() and path.read_bytes()[:4] == b"\x89PNG"


def test_sweep_isolates_errors(tmp_path, capsys):
    lines = [
        json.dumps({"command": "modular", "params": {"f": [[0, -2], [1, 3]], "p": 2}}),
        "{broken",
        "",
        json.dumps({"command": "modular", "params": {"f": [[0, -2], [1, 1]], "p": 2}}),
    ]
    path = tmp_path / "jobs.ndjson"
    path.write_text("\n".join(lines))
    assert main(["sweep", "--job", str(path)]) == 0
    out = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert [r.get("line") for r in out[:-1]] == [1, 2, 4]
    assert out[-1]["summary"] == {"total": 3, "errors": 1, "inconclusive": 0,
                                  "by_verdict": {"modular": 1, "not-modular": 1}}


def test_sweep_parallel_matches_serial():
    lines = [json.dumps({"command": "modular", "params": {"f": [[0, -k], [1, 1]], "p": 2}}) for k in range(1, 7)]
    assert sweep(lines, workers=1) == sweep(lines, workers=3)


def test_sweep_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.ndjson"
    path.write_text("")
    assert main(["sweep", "--job", str(path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["summary"]["total"] == 0


def test_out_file(tmp_path, capsys):
    out = tmp_path / "rep.json"
    main(["run", "--inline", json.dumps({"command": "modular", "params": {"f": [[0, 1], [1, 1]], "p": 2}}),
          "--out", str(out)])
    assert json.loads(out.read_text())["verdict"] == "not-modular"
    assert not os.path.exists(tmp_path / "missing")

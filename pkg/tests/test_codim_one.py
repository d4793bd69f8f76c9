#!/usr/bin/env python3
"""End-to-end runs of the codim-one command line"""
import json

import pytest

from codim_one import FORMATS, Report, TaskResult, main, render_report, replay_ids, run_session
from session import build_workspace, load_session


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_replay_list(capsys):
    code, out, _ = run(capsys, "replay", "--list")
    assert code == 0
    assert "quadric_threefold" in out.split()
    assert set(out.split()) == set(replay_ids())


def test_quadric_threefold(capsys):
    code, out, _ = run(capsys, "replay", "quadric_threefold")
    assert code == 0
    assert "supht(a) = 2, D(a) NOT AFFINE  [codimension-obstruction: w]" in out
    assert "note: ht(a) = 1" in out
    assert "upper bound 2  [ara-bound: a]" in out
    assert "lower bound 2  [finite-type-witness: w]" in out
    assert "assumed: A is a domain" in out


@pytest.mark.parametrize("k", [1, 2, 3])
def test_two_chart_certificates(capsys, k):
    code, out, _ = run(capsys, "replay", f"two_chart_k{k}")
    assert code == 0
    assert "supht(a) = 1, D(a) AFFINE  [unity-partition: c]" in out
    assert "cover, compatibility and unity verified" in out


@pytest.mark.parametrize("k", [1, 2])
def test_plane_reductions(capsys, k):
    code, out, _ = run(capsys, "replay", f"plane_reduction_k{k}", "--format", "json-lines")
    assert code == 0
    (result,) = [json.loads(line) for line in out.splitlines()]
    assert result["interval"] == [2, 2]
    assert result["verdict"] == "not-affine"
    assert result["notes"][0] == "ht(a) = 1"


@pytest.mark.parametrize("name, verdict, interval", [
    ("monomial_2dim", "not-affine", [2, 2]),
    ("cone_a1_ruling", "affine", [1, 1]),
    ("cone_a1_vertex", "not-affine", [2, 2]),
])
def test_small_algebras(capsys, name, verdict, interval):
    code, out, _ = run(capsys, "replay", name, "--format", "json-lines")
    assert code == 0
    (result,) = [json.loads(line) for line in out.splitlines()]
    assert (result["verdict"], result["interval"]) == (verdict, interval)


def test_surfaces(capsys):
    code, out, _ = run(capsys, "replay", "nine_point_cubic")
    assert code == 0
    assert "cfg: non-affine, superheight one (relative to supplied test curves)" in out
    assert "assumed: the nine points are in general position" in out
    code, out, _ = run(capsys, "replay", "one_point_blowup")
    assert code == 0
    assert "cfg: not affine" in out


def test_no_conclusion_exits_2(capsys, test_sessions_dir):
    code, out, _ = run(capsys, "run", str(test_sessions_dir / "projective_line.session"))
    assert code == 2
    assert "status: unknown" in out


def test_conflicting_evidence_exits_3(capsys, test_sessions_dir):
    code, out, _ = run(capsys, "run", str(test_sessions_dir / "two_chart_conflict.session"),
                       "--format", "json-lines")
    assert code == 3
    (result,) = [json.loads(line) for line in out.splitlines()]
    assert result["status"] == "inconsistent"
    assert "w" in result["error"] and "c" in result["error"]
    assert result["notes"] == ["conflicting evidence: w, c"]


def test_mixed_session_keeps_task_order_with_jobs(capsys, test_sessions_dir):
    code, out, _ = run(capsys, "run", str(test_sessions_dir / "mixed.session"),
                       "--format", "json-lines", "--jobs", "3")
    assert code == 2
    results = [json.loads(line) for line in out.splitlines()]
    assert [r["task"] for r in results] == ["ledger a", "ledger b", "surface cfg"]
    assert [r["status"] for r in results] == ["verdict", "verdict", "unknown"]
    assert results[1]["citation"] == "two-dimensional-rule: A"


def test_json_lines_round_trip(capsys):
    code, out, _ = run(capsys, "replay", "quadric_threefold", "--format", "json-lines", "--verbose")
    assert code == 0
    report = Report.from_json_lines(out)
    assert report.stats is not None and report.stats["bases"] > 0
    assert report.results[0].timing is not None
    assert report.to_json_lines() == out
    assert list(json.loads(out.splitlines()[0]))[:4] == ["task", "kind", "status", "verdict"]


def test_resource_cap_exits_4(capsys):
    code, out, _ = run(capsys, "replay", "two_chart_k1", "--max-spairs", "0")
    assert code == 4
    assert "status: resource-cap" in out


def test_advisory_prime_does_not_change_the_verdict(capsys):
    code, out, _ = run(capsys, "replay", "two_chart_k1", "--field", "fp:10007")
    assert code == 0
    assert "D(a) AFFINE" in out


def test_input_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "replay", "two_chart_k1", "--format", "xml")[0] == 1
    assert run(capsys, "replay", "two_chart_k1", "--field", "fp:4")[0] == 1
    assert run(capsys, "replay", "no_such_example")[0] == 1
    assert run(capsys, "run", str(tmp_path / "missing.session"))[0] == 1
    broken = tmp_path / "broken.session"
    broken.write_text("ring R = q[x]\nalgebra A = R / (x +)\n")
    code, _, err = run(capsys, "run", str(broken))
    assert code == 1
    assert "line 2" in err


def test_check_subcommand(capsys, sessions_dir):
    code, out, _ = run(capsys, "check", str(sessions_dir / "quadric_threefold.session"))
    assert code == 0
    assert out.strip() == "ok: 7 declarations, 1 tasks"


def test_ill_defined_witness_is_reported_not_fatal(capsys, tmp_path):
    text = (
        "ring RA = q[R, S, T, Z]\n"
        "algebra A = RA / (R*S - T*Z) domain\n"
        "ideal a in A = (R, T)\n"
        "ring RP = q[R, T]\n"
        "algebra P = RP domain factorial\n"
        "map phi : A -> P { R -> R, S -> 1, T -> T, Z -> 0 }\n"
        "witness w = map phi height 2\n"
        "task ledger a using w\n")
    path = tmp_path / "bad_witness.session"
    path.write_text(text)
    code, out, _ = run(capsys, "run", str(path), "--format", "json-lines")
    assert code == 2
    (result,) = [json.loads(line) for line in out.splitlines()]
    assert result["evidence"][0]["ok"] is False
    assert result["interval"] == [1, 2]


def test_audit_trail(capsys, tmp_path):
    audit_file = tmp_path / "audit.jsonl"
    config = tmp_path / "codim_one.yaml"
    config.write_text(f"logging:\n  audit_file: {audit_file}\n  include_timestamps: false\n")
    code, _, _ = run(capsys, "replay", "two_chart_k1", "--config", str(config))
    assert code == 0
    entries = [json.loads(line) for line in audit_file.read_text().splitlines()]
    actions = [e["action"] for e in entries]
    assert "certificate" in actions and actions[-1] == "task"
    assert entries[-1] == {"action": "task", "target": "ledger a", "ok": True,
                           "status": "verdict", "verdict": "affine"}


def test_exit_code_priority():
    def report(*statuses):
        return Report([TaskResult(f"t{i}", "ledger", s) for i, s in enumerate(statuses)])

    assert report().exit_code == 0
    assert report("verdict", "unknown").exit_code == 2
    assert report("unknown", "inconsistent").exit_code == 3
    assert report("unknown", "resource-cap", "inconsistent").exit_code == 4
    assert report("input-error", "resource-cap").exit_code == 1
    with pytest.raises(ValueError):
        render_report(report("verdict"), "xml")


@pytest.mark.parametrize("fmt", FORMATS)
def test_reports_are_byte_identical_across_runs_and_workers(capsys, test_sessions_dir, sessions_dir, fmt):
    for path in (test_sessions_dir / "mixed.session", sessions_dir / "quadric_threefold.session"):
        outputs = {run(capsys, "run", str(path), "--format", fmt, "--jobs", jobs)[1]
                   for jobs in ("1", "1", "2", "5")}
        assert len(outputs) == 1


def test_run_session_is_independent_of_pool_size(test_sessions_dir):
    ws = build_workspace(load_session(test_sessions_dir / "mixed.session"))
    rendered = {render_report(run_session(ws, jobs), "json-lines") for jobs in (1, 2, 3, 8)}
    assert len(rendered) == 1

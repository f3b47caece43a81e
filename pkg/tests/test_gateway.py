import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from webmint.cli import main
from webmint.gateway import ProjectConfig, pattern_id, prepare

from conftest import DEMO


@pytest.fixture
def project(tmp_path):
    """Throwaway copy of the demo project."""
    for name in ("hierarchy.json", "access.log", "example_sessions.ndjson"):
        shutil.copy(DEMO / name, tmp_path / name)
    cfg = {
        "logs": ["access.log"],
        "hierarchy": "hierarchy.json",
        "session_store": "out/sessions.ndjson",
        "output_dir": "out",
        "session": {"no_dwell_threshold": True, "no_success_relabel": True},
        "heuristics": {"frequent_pattern_min_support": 2, "postminer_thr": 2},
    }
    path = tmp_path / "project.json"
    path.write_text(json.dumps(cfg))
    example = dict(cfg, logs=[], session_store="example_sessions.ndjson")
    (tmp_path / "example_project.json").write_text(json.dumps(example))
    return tmp_path


def run(*args, expect=0):
    result = CliRunner().invoke(main, [str(a) for a in args])
    assert result.exit_code == expect, result.output
    return result


def test_prepare_prints_partition_counts(project):
    result = run("prepare", "-c", project / "project.json")
    assert "4 sessions: 2 customer, 2 noncustomer, 0 inactive" in result.output
    assert (project / "out" / "sessions.ndjson").exists()
    report = json.loads((project / "out" / "cleaning_report.json").read_text())
    assert report["parse_errors"] == 1
    assert report["ignored_agent"] == 1
    assert report["ignored_extension"] == 1


def test_prepare_is_deterministic(project):
    run("prepare", "-c", project / "project.json")
    first = (project / "out" / "sessions.ndjson").read_bytes()
    run("prepare", "-c", project / "project.json")
    assert (project / "out" / "sessions.ndjson").read_bytes() == first


def test_config_via_environment(project, monkeypatch):
    monkeypatch.setenv("WEBMINT_CONFIG", str(project / "project.json"))
    result = CliRunner().invoke(main, ["prepare"])
    assert result.exit_code == 0


def test_missing_config_fails(tmp_path):
    result = CliRunner().invoke(main, ["prepare", "-c", str(tmp_path / "no.json")])
    assert result.exit_code != 0
    assert "not found" in result.output


def test_mine_before_prepare_fails(project):
    result = CliRunner().invoke(
        main, ["mine", "-c", str(project / "project.json"), "-q", "x"])
    assert result.exit_code != 0
    assert "prepare" in result.output


def test_aggregate(project):
    result = run("aggregate", "-c", project / "example_project.json",
                 "--view", "all")
    assert "3 sessions aggregated" in result.output
    doc = json.loads((project / "out" / "aggregate_all.json").read_text())
    assert doc["hits"] == 3


def test_mine_writes_results_and_patterns(project):
    q = ("select t from node as x y, template # x [0;3] y as t "
         'where y.url contains "Descr" and y.occurrence = 1')
    result = run("mine", "-c", project / "example_project.json", "-q", q)
    docs = json.loads(result.output)
    assert [d["gsequence"] for d in docs] == [
        "# (ParamA,1) [0;3] (TextOnlyDescr,1)"]
    assert docs[0]["id"] == pattern_id(docs[0]["gsequence"], "all")
    stored = project / "out" / "patterns" / f"{docs[0]['id']}.json"
    assert json.loads(stored.read_text()) == docs[0]


def test_mine_from_file_and_view(project):
    qfile = project / "q.mint"
    qfile.write_text("select t from node as x, template # x as t\n")
    result = run("mine", "-c", project / "example_project.json",
                 "-f", qfile, "--view", "customer")
    docs = json.loads(result.output)
    assert docs[0]["stats"][0]["support"] == 2


def test_mine_query_diagnostics(project):
    result = CliRunner().invoke(
        main, ["mine", "-c", str(project / "example_project.json"),
               "-q", "select t from node t"])
    assert result.exit_code != 0
    assert "line 1" in result.output


def test_mine_requires_exactly_one_source(project):
    result = CliRunner().invoke(
        main, ["mine", "-c", str(project / "example_project.json")])
    assert result.exit_code != 0


def test_export_json_and_dot(project):
    q = "select t from node as x, template # x as t"
    docs = json.loads(run("mine", "-c", project / "example_project.json",
                          "-q", q).output)
    pid = docs[0]["id"]
    out = run("export", "-c", project / "example_project.json",
              "--format", "json", pid)
    assert json.loads(out.output)["id"] == pid
    dot = run("export", "-c", project / "example_project.json",
              "--format", "dot", pid)
    assert "digraph" in dot.output and "ParamA,1 (3)" in dot.output


def test_export_unknown_pattern(project):
    result = CliRunner().invoke(
        main, ["export", "-c", str(project / "example_project.json"), "nope"])
    assert result.exit_code != 0


def test_measure_commands(project):
    contact = run("measure", "contact", "-c", project / "example_project.json",
                  "--format", "json")
    rows = {r["concept"]: r for r in json.loads(contact.output)}
    assert rows["ParamA"]["contact"]["percent"] == "100.0"
    conv = run("measure", "conversion", "-c", project / "example_project.json",
               "-t", "TextOnlyDescr")
    assert "66.7" in conv.output


def test_report_commands(project):
    for sub in ("contact", "conversion", "compare"):
        result = run("report", sub, "-c", project / "example_project.json")
        json.loads(result.output)  # valid JSON findings
    md = run("report", "compare", "-c", project / "example_project.json",
             "--format", "md")
    assert md.output.startswith(("# Findings", "No findings."))


def test_synth_command(project):
    scenario = {"seed": 3, "sessions": 50, "inactive_share": 0.2,
                "strategies": [{"concept": "FS", "share": 0.6,
                                "conversion": 0.5}]}
    spath = project / "scenario.json"
    spath.write_text(json.dumps(scenario))
    result = run("synth", spath, "-o", project / "synth.ndjson",
                 "--hierarchy-out", project / "synth_h.json",
                 "--truth-out", project / "truth.json")
    assert "wrote 50 sessions" in result.output
    truth = json.loads((project / "truth.json").read_text())
    assert truth["per_strategy"]["FS"]["sessions"] == 30
    from webmint.taxonomy import load_hierarchy_file
    h = load_hierarchy_file(project / "synth_h.json")
    assert h.role_of("FS") == "action"


def test_prepare_library_entry_point(project):
    cfg = ProjectConfig.load(project / "project.json")
    slog, report = prepare(cfg)
    assert slog.counts()["all"] == 4
    assert report.output_records == 11

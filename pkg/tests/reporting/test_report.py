import csv
import json
import math

import pytest

from src.reporting import CheckReport, Metric, aggregate, exit_code, overall_status, to_jsonl, write_csv, write_jsonl


def report(*metrics, inconclusive=False, check="demo"):
    return CheckReport(check, "anchor", tuple(metrics), 7, inconclusive, wall_time=0.25, subject="zero")


@pytest.mark.parametrize("metric, passed", [
    (Metric("a", 0.5, 1.0), True),
    (Metric("a", 1.0, 1.0), False),
    (Metric("a", 2.0, 1.0, "lower"), True),
    (Metric("a", 0.5, 1.0, "lower"), False),
    (Metric("a", 1e9, kind="info"), True),
    (Metric("a", math.nan, 1.0), False),
    (Metric("a", math.inf, 1.0, "lower"), False),
])
def test_metric_passed(metric, passed):
    assert metric.passed is passed


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric("a", 1.0, 1.0, "between")
    with pytest.raises(ValueError):
        Metric("a", 1.0)


def test_status():
    ok = Metric("ok", 0.0, 1.0)
    bad = Metric("bad", 2.0, 1.0)
    assert report(ok).status == "pass"
    assert report(ok, bad).status == "fail"
    assert report(ok, bad, inconclusive=True).status == "inconclusive"
    assert report(ok, bad).failures() == [bad]


def test_overall_status_and_exit_code():
    ok = report(Metric("ok", 0.0, 1.0))
    unsure = report(Metric("ok", 0.0, 1.0), inconclusive=True)
    bad = report(Metric("bad", 2.0, 1.0))
    assert overall_status([ok]) == "pass" and exit_code([ok]) == 0
    assert overall_status([ok, unsure]) == "inconclusive" and exit_code([ok, unsure]) == 1
    assert overall_status([unsure, bad]) == "fail" and exit_code([unsure, bad]) == 1


def test_jsonl_lines_are_sorted_json():
    reports = [report(Metric("x", 0.1, 1.0, stderr=0.01)), report(Metric("y", math.inf, 1.0), check="other")]
    lines = to_jsonl(reports).splitlines()
    assert len(lines) == 2
    first = json.loads(lines[0])
    assert list(first) == sorted(first)
    assert first["status"] == "pass" and first["wall_time"] == 0.25
    assert first["metrics"][0] == {"name": "x", "value": 0.1, "tolerance": 1.0, "kind": "upper",
                                   "stderr": 0.01, "passed": True}
    assert json.loads(lines[1])["metrics"][0]["value"] == "inf"


def test_jsonl_without_wall_time():
    assert "wall_time" not in json.loads(to_jsonl([report(Metric("x", 0.1, 1.0))], wall_time=False))


def test_aggregate_counts():
    summary = aggregate([report(Metric("x", 0.1, 1.0)), report(Metric("x", 5.0, 1.0))])
    assert summary["status"] == "fail"
    assert summary["counts"] == {"pass": 1, "fail": 1, "inconclusive": 0}
    assert len(summary["reports"]) == 2


def test_writers(tmp_path):
    reports = [report(Metric("x", 0.1, 1.0), Metric("n", 3.0, kind="info"))]
    path = write_jsonl(reports, tmp_path / "out" / "run.jsonl")
    assert json.loads(path.read_text())["check"] == "demo"

    path = write_csv(reports, tmp_path / "out" / "run.csv")
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert [r["metric"] for r in rows] == ["x", "n"]
    assert rows[0]["status"] == "pass" and rows[0]["tolerance"] == "1.0"
    assert rows[1]["tolerance"] == "" and rows[1]["kind"] == "info"

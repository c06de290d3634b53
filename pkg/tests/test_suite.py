import pytest
import yaml

from psmodules.config import PROJECT_ROOT, load_config
from psmodules.errors import InvalidArgumentError
from psmodules.suite import (
    RUNNERS,
    load_checks,
    run_check,
    run_paper_suite,
    select_checks,
    suite_path,
)

FIXTURES = PROJECT_ROOT / "fixtures" / "paper_suite.yaml"


def _write(tmp_path, checks):
    path = tmp_path / "suite.yaml"
    path.write_text(yaml.safe_dump({"checks": checks}))
    return path


def test_pinned_checks_all_pass():
    report = run_paper_suite(FIXTURES, workers=2)
    assert report.results
    assert report.passed, [(r.name, r.detail) for r in report.failures]
    assert report.to_dict()["failed"] == []


def test_every_runner_has_a_pinned_check():
    kinds = {c["kind"] for c in load_checks(FIXTURES)}
    assert kinds == set(RUNNERS)


def test_filter_by_kind_tag_and_name():
    checks = load_checks(FIXTURES)
    assert {c["kind"] for c in select_checks(checks, "colon")} >= {"colon"}
    assert all(c["kind"] == "lcm" for c in select_checks(checks, "lcm"))
    assert [c["name"] for c in select_checks(checks, "refine-sqrt5-not-ps-swapped")] == ["refine-sqrt5-not-ps-swapped"]
    assert select_checks(checks, None) == checks


def test_tampered_expectation_fails(tmp_path):
    path = _write(
        tmp_path,
        [
            {"name": "lcm-ok", "kind": "lcm", "a": 4, "b": 6, "multiples": "[12]", "expect": 12},
            {"name": "lcm-wrong", "kind": "lcm", "a": 4, "b": 6, "multiples": "[12]", "expect": 24},
        ],
    )
    report = run_paper_suite(path, workers=1)
    assert not report.passed
    assert [r.name for r in report.failures] == ["lcm-wrong"]
    frame = report.to_frame()
    assert list(frame.columns) == ["name", "kind", "passed", "detail"]
    assert frame["passed"].tolist() == [True, False]


def test_arithmetic_errors_become_failures():
    result = run_check({"name": "bad", "kind": "lcm", "a": 4, "b": 6, "multiples": "[18]", "expect": 12})
    assert not result.passed
    assert "InvalidArgumentError" in result.detail
    assert result.kind == "lcm"


@pytest.mark.parametrize(
    "checks",
    [
        [{"name": "x", "kind": "nope"}],
        [{"kind": "lcm"}],
        [{"name": "x", "kind": "lcm"}, {"name": "x", "kind": "lcm"}],
    ],
)
def test_malformed_suites_are_rejected(tmp_path, checks):
    with pytest.raises(InvalidArgumentError):
        load_checks(_write(tmp_path, checks))


def test_suite_path_follows_config(tmp_path):
    cfg = load_config(tmp_path / "missing.yaml")
    assert suite_path(cfg).name == "paper_suite.yaml"
    assert suite_path(cfg, tmp_path) == tmp_path / "paper_suite.yaml"

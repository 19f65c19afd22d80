"""Shared fixtures plus the acceptance-criteria summary printed after a run."""

from __future__ import annotations

import pytest

from ella.config import AppConfig, RetrievalConfig
from ella.corpus import dump_articles, dump_cases, dump_interpretations

from fixture_corpus import FIXTURE_ARTICLES, FIXTURE_CASES, FIXTURE_INTERPRETATIONS

_ACCEPTANCE_RESULTS: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): a release acceptance criterion, reported by name"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and report.when == "call":
        name = marker.args[0]
        # a parametrized criterion fails as a whole if any case fails
        _ACCEPTANCE_RESULTS[name] = _ACCEPTANCE_RESULTS.get(name, True) and report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, passed in _ACCEPTANCE_RESULTS.items():
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[acceptance] {verdict} {name}")


@pytest.fixture
def fixture_bundle_paths(tmp_path):
    """Write the standard fixture corpus to disk; returns the three paths."""
    articles_path = tmp_path / "articles.jsonl"
    interpretations_path = tmp_path / "interpretations.jsonl"
    cases_path = tmp_path / "cases.jsonl"
    dump_articles(FIXTURE_ARTICLES, articles_path)
    dump_interpretations(FIXTURE_INTERPRETATIONS, interpretations_path)
    dump_cases(FIXTURE_CASES, cases_path)
    return articles_path, interpretations_path, cases_path


@pytest.fixture
def app_config(tmp_path, fixture_bundle_paths):
    articles_path, interpretations_path, cases_path = fixture_bundle_paths
    return AppConfig(
        articles_path=articles_path,
        interpretations_path=interpretations_path,
        cases_path=cases_path,
        data_dir=tmp_path / "conversations",
        retrieval=RetrievalConfig(),
    )

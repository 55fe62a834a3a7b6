from __future__ import annotations

import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else "FAIL"
    print(f"\n[acceptance] {outcome} {name}", flush=True)


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """One shared fixture corpus for pipeline-level tests."""
    from discoursekit.pipeline.fixture import build_fixture_corpus

    root = tmp_path_factory.mktemp("fixture")
    return build_fixture_corpus(root, seed=7)

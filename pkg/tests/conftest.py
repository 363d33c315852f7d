from __future__ import annotations

import numpy as np
import pytest

from myfood.dataset import FixtureSpec, default_taxonomy, generate_fixture


@pytest.fixture(scope="session")
def taxonomy():
    return default_taxonomy()


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """A small generated dataset shared by read-only tests (split: test)."""
    root = tmp_path_factory.mktemp("fixture") / "ds"
    generate_fixture(FixtureSpec(n_images=6, seed=7), root, split="test")
    return root


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_mask_pair(rng, max_side: int = 16, n_classes: int = 9):
    """Two random label masks of the same shape over background + n classes."""
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    pred = rng.integers(0, n_classes + 1, size=(h, w)).astype(np.uint8)
    gt = rng.integers(0, n_classes + 1, size=(h, w)).astype(np.uint8)
    return pred, gt


# ----------------------------------------------------------------- acceptance

def pytest_addoption(parser):
    parser.addoption(
        "--annotations-json", default=None,
        help="Path to the full published annotation export; enables the "
             "dataset replay check.")
    parser.addoption(
        "--replay-images", default=None,
        help="Directory with the full photo set; enables the optional "
             "full-scale replay check (also needs GPU plugins).")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(criterion): marks a top-level acceptance check")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL/SKIP line per acceptance criterion at the end of the run."""
    lines = []
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(outcome, []):
            criterion = getattr(report, "_acceptance_criterion", None)
            if criterion:
                lines.append((criterion, label))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for criterion, label in sorted(lines):
            terminalreporter.write_line(f"{label}: {criterion}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" or (report.when == "setup" and report.skipped):
        marker = item.get_closest_marker("acceptance")
        if marker:
            report._acceptance_criterion = marker.kwargs.get(
                "criterion", item.name)

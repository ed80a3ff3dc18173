import os
import random

import pytest
from hypothesis import HealthCheck, settings

from trainpoly.fixtures import random_train_track_map, running_classes, running_example
from trainpoly.marking import make_coordinates, mark
from trainpoly.twisted import build_labels

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


class Running:
    """The two-vertex example with root R, tree {a} and characters (s, w)."""

    def __init__(self):
        self.g = running_example()
        self.m = mark(self.g, root="R", tree=["a"])
        self.L = build_labels(self.m)
        self.classes = running_classes()
        self.coords = make_coordinates(self.m, [self.classes["s"], self.classes["w"]])


@pytest.fixture(scope="session")
def running():
    return Running()


@pytest.fixture(scope="session")
def random_maps():
    """Seeded expanding irreducible train track maps with at most 8 edges."""
    rng = random.Random(20240611)
    return [random_train_track_map(rng) for _ in range(40)]


# --------------------------------------------------------------------------
# one summary line per acceptance criterion

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        outcome = "PASS" if call.excinfo is None else "FAIL"
        prev = _criteria.get(n)
        if prev is None or prev[1] == "PASS":
            _criteria[n] = (title, outcome)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, outcome = _criteria[n]
        terminalreporter.write_line(f"[{outcome}] criterion {n}: {title}")

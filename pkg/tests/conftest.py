import random

import pytest
from hypothesis import HealthCheck, settings

from descsat.problem import Problem

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# clause list of the 8-clause instance where every clause removes one model
HARD8 = [
    (1, -2, -3),
    (1, 2, -3),
    (-1, -2, -3),
    (-1, 2, -3),
    (1, -2, 3),
    (1, 2, 3),
    (-1, -2, 3),
    (-1, 2, 3),
]

PHI = [(1, 2, -3), (-2, 3, -4), (-1, 3, -4)]
PHI_PRIME = [(-1, 2, -3), (-2, 3, -5), (-1, 3, -5)]


def random_problem(rng: random.Random, n: int, m: int) -> Problem:
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Problem(n, clauses)


# -- acceptance summary ------------------------------------------------------

_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = mark.args
        ok = rep.passed and not hasattr(rep, "wasxfail")
        prev = _criteria.get(num)
        note = getattr(item, "_criterion_note", "")
        if prev is None:
            _criteria[num] = [title, ok, note]
        else:
            prev[1] = prev[1] and ok
            if note:
                prev[2] = f"{prev[2]}; {note}" if prev[2] else note


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, ok, note = _criteria[num]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:>2} {status}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)

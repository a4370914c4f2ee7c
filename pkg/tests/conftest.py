"""Shared fixtures and the suite-wide certificate audit.

Every call to ``solve_proximal`` made during a test, directly or through the
flow and CLI layers, is recorded; after each test the recorded solutions are
checked for a nonnegative gap and exact Gibbs consistency of ``weights_w``.
"""

import threading
from pathlib import Path

import numpy as np
import pytest

import proxot
import proxot.cli
import proxot.particle_flow
import proxot.prox_solver as ps

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

AUDIT = {"solves": 0, "violations": []}
_lock = threading.Lock()
_recent = []
_original = ps.solve_proximal


def _audited(a, b, C, eps, config=None, init_psi=None, quiet=False):
    sol = _original(a, b, C, eps, config, init_psi=init_psi, quiet=quiet)
    with _lock:
        _recent.append((np.array(b, dtype=np.float64), sol))
    return sol


def certificate_problems(b, sol):
    problems = []
    if not sol.gap >= -1e-9:
        problems.append(f"gap {sol.gap!r} < -1e-9")
    w = ps.recover_weights(sol.potentials.psi, b, sol.epsilon)
    if not np.array_equal(w, sol.weights_w):
        problems.append(f"recover_weights(psi) differs from weights_w by {np.abs(w - sol.weights_w).max():.3e}")
    return problems


# installed before any test module imports the name
for _mod in (proxot, ps, proxot.particle_flow, proxot.cli):
    _mod.solve_proximal = _audited


@pytest.fixture(autouse=True)
def certificate_audit():
    _recent.clear()
    yield
    bad = []
    for b, sol in _recent:
        for msg in certificate_problems(b, sol):
            bad.append(msg)
    with _lock:
        AUDIT["solves"] += len(_recent)
        AUDIT["violations"].extend(bad)
    _recent.clear()
    assert not bad, "certificate invariant violated: " + "; ".join(bad[:3])


# acceptance criteria: (number, title) -> (passed, detail)
CRITERIA = {}
DETAILS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


def pytest_collection_modifyitems(items):
    # acceptance runs last so the audit criterion sees every other solve
    items.sort(key=lambda item: item.get_closest_marker("criterion") is not None)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when == "setup" and rep.passed:
        return
    key = tuple(mark.args)
    if rep.when == "call" or rep.failed:
        passed = rep.passed and CRITERIA.get(key, (True,))[0]
        CRITERIA[key] = (passed, DETAILS.get(item.nodeid, ""))


@pytest.fixture
def detail(request):
    """Attach a one-line measurement summary to the running criterion."""
    def note(text):
        DETAILS[request.node.nodeid] = text
    return note


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"certificate audit: {AUDIT['solves']} solve_proximal runs checked, "
        f"{len(AUDIT['violations'])} violations"
    )
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for (num, title), (passed, text) in sorted(CRITERIA.items()):
            terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {num:2d}. {title}: {text}")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))

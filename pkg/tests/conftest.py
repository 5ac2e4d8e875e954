from itertools import product

import pytest


def brute_force_lengths(oracle, radius):
    """Word lengths by enumerating every word of length <= radius; independent of the BFS."""
    letters = [g for _, g in oracle.letters()]
    best = {}
    for r in range(radius + 1):
        for combo in product(letters, repeat=r):
            elt = oracle.identity
            for g in combo:
                elt = oracle.multiply(elt, g)
            best.setdefault(oracle.key(elt), r)
    return best


@pytest.fixture
def brute_force():
    return brute_force_lengths


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(k, description, ok, elapsed=None):
        timing = "" if elapsed is None else f" [{elapsed:.2f}s]"
        line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {description}{timing}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

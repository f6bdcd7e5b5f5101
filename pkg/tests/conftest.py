import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

from coocnet.graph import CoGraph  # noqa: E402


def graph(n, edges, labels=None):
    """CoGraph from ``(u, v)`` or ``(u, v, w)`` tuples."""
    edges = [e if len(e) == 3 else (e[0], e[1], 1) for e in edges]
    return CoGraph.from_edges(n, edges, labels)


@pytest.fixture
def triangle():
    return graph(3, [(0, 1), (1, 2), (0, 2)], ["a", "b", "c"])


@pytest.fixture
def two_triangles():
    return graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


def two_cliques(k=10):
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(k + i, k + j) for i, j in edges]
    edges.append((k - 1, k))
    return graph(2 * k, edges)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(_VERDICTS, [])

    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  AC{number:<2} {title}: {detail}"
        lines.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)

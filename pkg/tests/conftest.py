import pytest

from mwsplan.netmodel import topology_from_dict


def make_topology(nodes, links, name="t"):
    """``nodes``: ids (weight 1) or (id, weight); ``links``: (a, b, km)."""
    recs = [{"id": n, "weight": 1.0} if isinstance(n, str) else {"id": n[0], "weight": n[1]} for n in nodes]
    return topology_from_dict({"nodes": recs, "links": [{"a": a, "b": b, "length_km": km} for a, b, km in links]},
                              name=name)


@pytest.fixture
def two_node():
    return make_topology(["A", "B"], [("A", "B", 80.0)])


@pytest.fixture
def triangle():
    return make_topology(["A", "B", "C"], [("A", "B", 1.0), ("B", "C", 1.0), ("A", "C", 1.0)])


ACCEPTANCE_LINES: list[str] = []


def record(criterion, ok, detail):
    """Log an acceptance verdict and return it so the test can assert on it."""
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import itertools

import numpy as np
import pytest

from mtfuzzy.mtbdd import NodeTable


def all_assignments(nvars):
    return itertools.product((0, 1), repeat=nvars)


def brute_values(table, h, nvars):
    """Value of ``h`` on every assignment, in binary counting order."""
    return [table.eval(h, bits) for bits in all_assignments(nvars)]


def shannon(table, values, level=0):
    """Build bottom-up from a full truth table using only make_node."""
    if len(values) == 1:
        return table.terminal(values[0])
    half = len(values) // 2
    lo = shannon(table, values[:half], level + 1)
    hi = shannon(table, values[half:], level + 1)
    return table.make_node(level, lo, hi) if lo != hi else lo


def reduced_node_count(values):
    """Internal nodes of the reduced diagram, from cofactor tables alone.

    A node exists at level t for every distinct sub-table reached by a
    length-t prefix whose two halves differ.
    """
    values = tuple(values)
    nvars = len(values).bit_length() - 1
    total = 0
    for t in range(nvars):
        width = len(values) >> t
        subs = {values[s:s + width] for s in range(0, len(values), width)}
        total += sum(1 for s in subs if s[:width // 2] != s[width // 2:])
    return total


def random_values(rng, nvars, top, zero_prob=0.5, n_levels=None):
    """Random truth table; ``n_levels`` limits the distinct non-zero values."""
    size = 1 << nvars
    palette = rng.integers(1, top + 1, size=n_levels or 4)
    vals = rng.choice(palette, size=size)
    vals[rng.random(size) < zero_prob] = 0
    return [int(v) for v in vals]


def random_relation_matrix(rng, n, top, density=0.3, levels=None, reflexive=False,
                           symmetric=False):
    palette = rng.integers(1, top + 1, size=levels or 4)
    m = rng.choice(palette, size=(n, n))
    m[rng.random((n, n)) >= density] = 0
    if symmetric:
        m = np.triu(m)
        m = m + np.triu(m, 1).T
    if reflexive:
        np.fill_diagonal(m, top)
    return m.astype(np.int64)


def brute_mmc(a, b):
    n = len(a)
    return [[max(min(a[i][c], b[c][j]) for c in range(n)) for j in range(n)] for i in range(n)]


def path_closure(m):
    """Best-path strength by widest-path Dijkstra from every source (third oracle)."""
    n = len(m)
    out = [[0] * n for _ in range(n)]
    for s in range(n):
        best = [0] * n
        best[s] = max(m[s][s], 0)
        # reflexive inputs: the empty path has full strength
        done = [False] * n
        for _ in range(n):
            u = max((v for v in range(n) if not done[v]), key=lambda v: best[v])
            done[u] = True
            for v in range(n):
                w = min(best[u], m[u][v])
                if w > best[v]:
                    best[v] = w
        out[s] = best
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def table():
    return NodeTable(precision=1)


ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)

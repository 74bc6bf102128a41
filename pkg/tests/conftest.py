import itertools

import pytest

from ec3lab.formula import Formula, generate_random

_ACCEPTANCE_LINES: list[str] = []


def naive_models(f: Formula):
    """All satisfying assignments by direct enumeration, counting trues per clause."""
    out = []
    for bits in itertools.product((False, True), repeat=f.n):
        if all(sum(bits[v - 1] for v in c) == 1 for c in f.clauses):
            out.append(bits)
    return out


def naive_cnf_models(cnf, n):
    out = []
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in cnf):
            out.append(bits)
    return out


def random_small_formulas(count, n_range=(4, 15), r_range=(0.3, 0.9), seed=0):
    import numpy as np

    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        r = float(rng.uniform(*r_range))
        yield generate_random(n, r, seed * 100_000 + i)


@pytest.fixture
def report():
    def add(name: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

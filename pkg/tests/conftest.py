import math
import random

import pytest

from mipoly.ntheory import is_squarefree, rad

F4 = (15, 17, 255, 2161)
F5 = (15, 17, 557, 255, 871711)


def brute_roots(values, m):
    return [x for x in range(m) if math.prod(x * x - a for a in values) % m == 0]


def random_squarefree(rng, bound=10_000, negative=False):
    while True:
        v = rng.randint(2, bound)
        if negative and rng.random() < 0.2:
            v = -v
        if is_squarefree(v):
            return v


def random_family(rng, n, bound=10_000, negative=False, structured=False):
    """Distinct valid members. Structured families plant x, y, rad(x*y) and a
    member = 1 mod 8 so that intersective families actually occur."""
    vals = []
    if structured:
        x, y = random_squarefree(rng, 100), random_squarefree(rng, 100)
        vals = [x, y, rad(x * y)]
        while True:
            v = 8 * rng.randint(1, bound // 8) + 1
            if is_squarefree(v) and v <= bound:
                vals.append(v)
                break
        vals = [v for v in dict.fromkeys(vals) if v != 1][:n]
    while len(vals) < n:
        v = random_squarefree(rng, bound, negative)
        if v not in vals:
            vals.append(v)
    rng.shuffle(vals)
    return tuple(vals)


def corpus(seed, count, sizes=range(3, 9), negative=False):
    rng = random.Random(seed)
    return [
        random_family(rng, rng.choice(list(sizes)), negative=negative, structured=(k % 2 == 1))
        for k in range(count)
    ]


@pytest.fixture(scope="session")
def f4():
    return F4


@pytest.fixture(scope="session")
def f5():
    return F5


ACCEPTANCE_LINES = []


def acceptance_line(criterion, ok, detail):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

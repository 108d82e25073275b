import random

import pytest

from zksvm.group import derive_params


@pytest.fixture
def rng():
    return random.Random(0x5EED)


@pytest.fixture(scope="session")
def params4():
    return derive_params(b"zksvm-v1", 4)


@pytest.fixture(scope="session")
def params8():
    return derive_params(b"zksvm-v1", 8)


def naive_mul(P, k):
    """Double-and-add using only the group law."""
    from zksvm.group import Point

    acc, base = Point.identity(), P
    k = int(k)
    while k:
        if k & 1:
            acc = acc + base
        base = base + base
        k >>= 1
    return acc


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: list[str] = []


def report(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

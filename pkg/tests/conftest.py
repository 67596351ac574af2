import numpy as np
import pytest

from ciprng.bitcore import BooleanFunction, builtin_function

TABLE2 = "abcdefghi"


@pytest.fixture(scope="session")
def table2():
    return {name: builtin_function(name) for name in TABLE2}


def random_function(rng: np.random.Generator, n: int) -> BooleanFunction:
    return BooleanFunction(n, tuple(int(v) for v in rng.integers(0, 1 << n, size=1 << n)))


# criterion number -> (verdict, detail), filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {verdict:<9} {detail}")

import numpy as np
import pytest

from reconstructability import Distribution, Model, Scheme

# The worked 2x2x2 example table, in 64ths, cell order v1 v2 v3 (v3 fastest).
TABLE_64THS = [14, 2, 7, 1, 21, 3, 14, 2]


@pytest.fixture
def scheme3():
    return Scheme.binary(3)


@pytest.fixture
def table_p(scheme3):
    return Distribution(scheme3, np.array(TABLE_64THS) / 64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def model(scheme, *comps):
    return Model.of(scheme, [c.split(",") for c in comps])


@pytest.fixture
def loop3(scheme3):
    return model(scheme3, "v1,v2", "v1,v3", "v2,v3")


# criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

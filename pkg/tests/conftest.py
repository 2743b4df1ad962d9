import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dgva import builders  # noqa: E402


@pytest.fixture(scope="session")
def dual():
    return builders.dual_numbers()


@pytest.fixture(scope="session")
def nil():
    return builders.nilpotent_dg()


@pytest.fixture(scope="session")
def heis4():
    return builders.build_heisenberg(4)


@pytest.fixture(scope="session")
def heis6():
    return builders.build_heisenberg(6)


@pytest.fixture(scope="session")
def heis7():
    return builders.build_heisenberg(7)


@pytest.fixture(scope="session")
def small_models(dual, nil, heis4):
    return {"dual": dual, "nilpotent-dg": nil, "heisenberg4": heis4}

import pytest

from flowdata import BUBBLE_CFG, CONSTANT_CFG, run_flow


@pytest.fixture(scope="session")
def constant_run(tmp_path_factory):
    return run_flow(CONSTANT_CFG, tmp_path_factory.mktemp("flows") / "constant")


@pytest.fixture(scope="session")
def bubble_run(tmp_path_factory):
    return run_flow(BUBBLE_CFG, tmp_path_factory.mktemp("flows") / "bubble")

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False,
                     help="also run the full-size acceptance tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


WORKED_WEIGHTS = (0.3, 0.1, 0.05, 0.05, 0.2, 0.07, 0.1, 0.03)


@pytest.fixture
def worked_weights():
    return WORKED_WEIGHTS

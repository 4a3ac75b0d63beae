import pytest

from derivrule import (PrecisionContext, chebyshev, coulomb_pollaczek, gegenbauer, hermite,
                       laguerre, legendre)


def pytest_addoption(parser):
    parser.addoption("--heavy", action="store_true", default=False,
                     help="run the long reproduction targets")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--heavy"):
        return
    skip = pytest.mark.skip(reason="needs --heavy")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


CATALOG = [
    chebyshev(1), chebyshev(2), chebyshev(3), chebyshev(4), legendre(), gegenbauer(3),
    gegenbauer(20), hermite(), laguerre(0), laguerre("1/2"),
    coulomb_pollaczek(0, 1, 4), coulomb_pollaczek(1, 1, 3), coulomb_pollaczek(0, -1, 4),
    coulomb_pollaczek(2, "-1/2", 5),
]


def catalog_ids():
    return [s.spec for s in CATALOG]


@pytest.fixture(scope="session")
def ctx():
    return PrecisionContext(50)


@pytest.fixture(scope="session")
def ctx30():
    return PrecisionContext(30)

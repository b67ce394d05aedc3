import pytest

from a1degree.fields import PrimeField, QQ, SimpleExtension


@pytest.fixture(scope="session")
def f5():
    return PrimeField(5)


@pytest.fixture(scope="session")
def f7():
    return PrimeField(7)


@pytest.fixture(scope="session")
def f25(f5):
    return SimpleExtension(f5, "b", [-2, 0, 1])


@pytest.fixture(scope="session")
def f49(f7):
    return SimpleExtension(f7, "c", [-3, 0, 1])


@pytest.fixture(scope="session")
def qq():
    return QQ

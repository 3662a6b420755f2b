import pytest

from jetvar import JetContext


@pytest.fixture
def ode1():
    """One base variable, one fiber variable, first order."""
    return JetContext(n=1, m=1, order=1)


@pytest.fixture
def ode2():
    return JetContext(n=1, m=1, order=2)


@pytest.fixture
def plane1():
    """Two base variables, one fiber variable, first order."""
    return JetContext(n=2, m=1, order=1)


@pytest.fixture
def plane2():
    return JetContext(n=2, m=1, order=2)

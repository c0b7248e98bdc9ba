from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from qeuler.numeric import FunctionFieldContext, PadicContext, RationalContext

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ff():
    return FunctionFieldContext()


@pytest.fixture
def rat_half():
    return RationalContext(Fraction(1, 2))


@pytest.fixture
def p3():
    return PadicContext(3, 12)

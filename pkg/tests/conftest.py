import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    print_blob=True,
)
settings.load_profile("exact")

from ffcircle.census import CurveCensus
from ffcircle.curves import BoxCensus
from ffcircle.fields import Fq
from ffcircle.forms import Form


@pytest.fixture(scope="session")
def f5():
    return Fq.get(5)


@pytest.fixture(scope="session")
def f7():
    return Fq.get(7)


@pytest.fixture(scope="session")
def fermat5(f5):
    return Form.fermat(f5, 4, 3)


@pytest.fixture(scope="session")
def fermat7(f7):
    return Form.fermat(f7, 4, 3)


# The degree-2 boxes and censuses are the expensive shared inputs; the
# acceptance criteria and several unit tests reuse them, so they are
# built once per session.


@pytest.fixture(scope="session")
def box5_e1(fermat5):
    return BoxCensus.build(fermat5, 1)


@pytest.fixture(scope="session")
def box5_e2(fermat5):
    return BoxCensus.build(fermat5, 2)


@pytest.fixture(scope="session")
def box7_e1(fermat7):
    return BoxCensus.build(fermat7, 1)


@pytest.fixture(scope="session")
def box7_e2(fermat7):
    return BoxCensus.build(fermat7, 2)


@pytest.fixture(scope="session")
def census5_e1(fermat5, box5_e1):
    return CurveCensus.build(fermat5, 1, box=box5_e1)


@pytest.fixture(scope="session")
def census5_e2(fermat5, box5_e2):
    return CurveCensus.build(fermat5, 2, box=box5_e2)


@pytest.fixture(scope="session")
def census7_e1(fermat7, box7_e1):
    return CurveCensus.build(fermat7, 1, box=box7_e1)


@pytest.fixture(scope="session")
def census7_e2(fermat7, box7_e2):
    return CurveCensus.build(fermat7, 2, box=box7_e2)

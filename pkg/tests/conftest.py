import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

from dblcat_fibrations.config import Settings, use_settings
from dblcat_fibrations.core_cat import chain
from dblcat_fibrations.corpus import transposition, un_example
from dblcat_fibrations.groth import copresheaf_of

hypothesis_settings.register_profile(
    "dblcat", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
hypothesis_settings.load_profile("dblcat")


@pytest.fixture(autouse=True)
def default_settings():
    """Every test starts from default settings, whatever the environment says"""
    use_settings(Settings())
    yield
    use_settings(Settings())


@pytest.fixture
def un_functor():
    return un_example()


@pytest.fixture
def un_copresheaf(un_functor):
    p, _ = copresheaf_of(un_functor)
    return p


@pytest.fixture
def transposition_2():
    return transposition(chain(2))

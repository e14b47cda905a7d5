import pytest

from ddradar import make_params, reference_bad_code, reference_good_code, synthesize_discrete


@pytest.fixture(scope="session")
def p_default():
    return make_params(64, 16, 8, 8, 1.0)


@pytest.fixture(scope="session")
def p_square():
    return make_params(64, 64, 8, 8, 1.0)


@pytest.fixture(scope="session")
def good_code():
    return reference_good_code()


@pytest.fixture(scope="session")
def bad_code():
    return reference_bad_code()


@pytest.fixture(scope="session")
def s_paper(p_default, good_code):
    return synthesize_discrete(good_code, p_default)

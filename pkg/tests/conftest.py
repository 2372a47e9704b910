import pytest

from nonsense_factory import build_vocabulary, default_scheme


@pytest.fixture(scope="session")
def vocab():
    return build_vocabulary(5000)


@pytest.fixture(scope="session")
def scheme(vocab):
    return default_scheme(vocab)

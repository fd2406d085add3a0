import pytest

from _synth import synthetic_corpus


@pytest.fixture(scope="session")
def corpus():
    return synthetic_corpus(400)

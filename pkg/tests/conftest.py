import pytest

from defeq.demo import load_corpus


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def t1(corpus):
    return corpus.t1


@pytest.fixture(scope="session")
def t2(corpus):
    return corpus.t2


@pytest.fixture(scope="session")
def t3(corpus):
    return corpus.t3

import pytest

from indisc.corpus import generate_corpus
from indisc.grammar import parse_formula


def P(text, language="LA"):
    return parse_formula(text, language)


@pytest.fixture(scope="session")
def corpus500():
    return [e.formula for e in generate_corpus(7, 4, 500)]


@pytest.fixture(scope="session")
def corpus_d2():
    return [e.formula for e in generate_corpus(3, 2, 120)]

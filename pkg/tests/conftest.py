import pytest

from mlogic.parser import parse


@pytest.fixture
def barbara():
    return parse(
        "all P. all Q. all R. ((all x. (~P(x) | Q(x))) & (all x. (~Q(x) | R(x)))"
        " -> all x. (~P(x) | R(x)))")

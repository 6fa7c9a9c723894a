import pytest

from satguide.parser import parse_tptp


@pytest.fixture
def socrates():
    return parse_tptp(
        """
        cnf(a1, axiom, (~human(X) | mortal(X))).
        cnf(a2, axiom, (human(socrates))).
        cnf(g, negated_conjecture, (~mortal(socrates))).
        """,
        name="socrates",
    )


def parse(text: str, name: str = "t"):
    return parse_tptp(text, name=name)

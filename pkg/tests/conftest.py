import pytest

from majoranahv.core import parse_scenario


def scenario(text: str, name: str = "t"):
    """Parse a one-line scenario written with ' / ' as the line separator."""
    return parse_scenario(text.replace(" / ", "\n"), name)


@pytest.fixture
def make_scenario():
    return scenario

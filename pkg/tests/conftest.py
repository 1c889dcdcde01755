import pytest

from trendrec.taxonomy import default_taxonomy


@pytest.fixture(scope="session")
def tax():
    return default_taxonomy()

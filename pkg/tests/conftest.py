import pytest

from dlgram import builtin_grammar


@pytest.fixture(scope="session")
def english():
    return builtin_grammar("english_sem")


@pytest.fixture(scope="session")
def french():
    return builtin_grammar("french_syn")

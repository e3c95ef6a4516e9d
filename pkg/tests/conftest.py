import pathlib
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

from tierlang import opreg, parser  # noqa: E402


def corpus(name: str) -> str:
    return str(ROOT / "corpus" / name)


@pytest.fixture(scope="session")
def registry():
    return opreg.builtin_registry()


@pytest.fixture(scope="session")
def bubble():
    return parser.parse_file(corpus("bubble.tl"))


@pytest.fixture(scope="session")
def iterator_program():
    return parser.parse_file(corpus("I.tl2"))

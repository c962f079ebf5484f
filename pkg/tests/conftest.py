import random
from pathlib import Path

import pytest

from plkit.compiler import compile_model
from plkit.generate import random_model
from plkit.model import enumerate_brute_force
from plkit.modelio import SourceDocument, parse_model

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_model(name: str):
    return parse_model(SourceDocument.from_path(FIXTURES / name))


@pytest.fixture(scope="session")
def press_model():
    return load_model("press.fm")


@pytest.fixture()
def press_system(press_model):
    return compile_model(press_model)


@pytest.fixture(scope="session")
def press_solutions(press_model):
    return enumerate_brute_force(press_model)


@pytest.fixture(scope="session")
def small_corpus():
    """A modest random corpus for module-level property tests; the full
    500-model corpus lives in the acceptance suite."""
    rng = random.Random(20240811)
    corpus = []
    for i in range(60):
        model = random_model(rng, rng.randint(4, 10), name=f"rnd{i}")
        corpus.append((model, enumerate_brute_force(model)))
    return corpus

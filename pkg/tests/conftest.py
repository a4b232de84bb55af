import pytest

from gbsed.ontology import default_ontology
from gbsed.scenarios import ScenarioSpec, generate


@pytest.fixture(scope="session")
def ontology():
    return default_ontology()


@pytest.fixture(scope="session")
def default_corpus(ontology):
    """100 sequences x 10 frames = 1000 scenes, the reference corpus."""
    return generate(ScenarioSpec(seed=42), ontology)


@pytest.fixture(scope="session")
def corpus_frames(default_corpus):
    return [frame for seq in default_corpus for frame in seq.frames]

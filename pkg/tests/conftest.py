import pytest
from hypothesis import HealthCheck, settings

from homsynth.graphcore import Graph, parse_graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PENDANT_CYCLE = "e 1 2 / e 2 3 / e 3 4 / e 1 4 / e 2 6 / e 4 5"

CORPUS = {
    "K2": "clique:2",
    "P3": "path:3",
    "P4": "path:4",
    "K1,3": "star:3",
    "K3": "clique:3",
    "C4": "cycle:4",
    "C6": "cycle:6",
    "K4": "clique:4",
    "dary:2:3": "dary:2:3",
    "dary:3:2": "dary:3:2",
    "dary:2:4": "dary:2:4",
    "dary:3:3": "dary:3:3",
    "pendant-cycle": PENDANT_CYCLE,
}


def corpus_graph(name: str) -> Graph:
    return parse_graph(CORPUS[name])


@pytest.fixture(scope="session")
def corpus():
    return {name: parse_graph(text) for name, text in CORPUS.items()}

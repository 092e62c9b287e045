import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gretlite import corpus
from gretlite.formats import load_graph, load_schema

import genutil


@pytest.fixture(scope="session")
def graph1_schema():
    return genutil.graph1_schema()


@pytest.fixture(scope="session")
def graph2_schema():
    return genutil.graph2_schema()


@pytest.fixture(scope="session")
def hello_ext_schema():
    return genutil.hello_ext_schema()


@pytest.fixture
def sample1(graph1_schema):
    return load_graph(corpus.read_text("sample1.glg"), graph1_schema)


@pytest.fixture
def sample2(graph1_schema):
    return load_graph(corpus.read_text("sample2.glg"), graph1_schema)


@pytest.fixture
def chain4(graph2_schema):
    return load_graph(corpus.read_text("chain4.glg"), graph2_schema)


def corpus_text(name: str) -> str:
    return corpus.read_text(name)

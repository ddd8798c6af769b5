import sys
from pathlib import Path

import pytest

from manymodal import build_lattice, load_document

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "examples" / "paper"
CORPUS_FILES = sorted(CORPUS.glob("*.json"))

sys.path.insert(0, str(Path(__file__).resolve().parent))


def corpus(name):
    return load_document(CORPUS / name)


@pytest.fixture(scope="session")
def docs():
    return {p.name: load_document(p) for p in CORPUS_FILES}


@pytest.fixture(scope="session")
def diamond():
    return build_lattice(["0", "a", "b", "1"],
                         covers=[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
                         complement={"a": "b", "b": "a", "0": "1", "1": "0"}, name="D")


@pytest.fixture(scope="session")
def chain3():
    return build_lattice(["0", "1'", "1"], covers=[("0", "1'"), ("1'", "1")],
                         complement={"1": "0", "1'": "0", "0": "1"}, name="C")


@pytest.fixture(scope="session")
def two():
    return build_lattice(["0", "1"], covers=[("0", "1")],
                         complement={"0": "1", "1": "0"}, name="2")

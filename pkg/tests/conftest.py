from pathlib import Path

import pytest

from sgreti.corpus import ingest_scene_graphs
from sgreti.database import Database, write_database
from sgreti.embedding import load_embeddings
from sgreti.lexicon import load_lexicon

DATA = Path(__file__).parent / "data"
F1_PATH = DATA / "f1_lexicon.tsv"
F2_PATH = DATA / "f2_vectors.txt"
DESK_LEXICON = DATA / "desk_lexicon.tsv"
DESK_VECTORS = DATA / "desk_vectors.txt"
C1_PATH = DATA / "c1_scene_graphs.txt"


@pytest.fixture(scope="session")
def f1():
    return load_lexicon(F1_PATH)


@pytest.fixture(scope="session")
def f2():
    return load_embeddings(F2_PATH)


@pytest.fixture(scope="session")
def desk_lexicon():
    return load_lexicon(DESK_LEXICON)


@pytest.fixture(scope="session")
def desk_vectors():
    return load_embeddings(DESK_VECTORS)


@pytest.fixture(scope="session")
def c1(desk_lexicon):
    return ingest_scene_graphs(C1_PATH, desk_lexicon)


@pytest.fixture(scope="session")
def c1_db(c1, tmp_path_factory):
    path = tmp_path_factory.mktemp("c1") / "db"
    write_database(c1, path)
    return Database.open(path)


# -- acceptance summary: one line per criterion ---------------------------------

_CRITERIA: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        if report.outcome == "failed" or name not in _CRITERIA:
            _CRITERIA[name] = report.outcome.upper()


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        number, label = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {number}: {'PASS' if _CRITERIA[name] == 'PASSED' else 'FAIL'}  {label}")

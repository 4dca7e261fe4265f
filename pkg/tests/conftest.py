import pytest

from dipstr.genetics import AlleleDatabase, CaseInput, Genotype, Observation
from dipstr.io import fixture_path, read_cases, read_database
from dipstr.posterior import PriorConfig, Uniform


def make_case(victim, suspect, observed, locus=""):
    return CaseInput(Genotype.of(*victim), Genotype.of(*suspect), Observation.of(observed), locus)


@pytest.fixture
def n0_case():
    """Empty database; victim L-L, suspect S1/S2 seen in the trace."""
    return make_case(("L1", "L1"), ("S1", "S2"), ["S1", "S2"])


@pytest.fixture
def empty_db():
    return AlleleDatabase()


@pytest.fixture
def tiny_prior():
    return PriorConfig(3, 1.0, Uniform())


@pytest.fixture(scope="session")
def mid1950_db():
    return read_database(fixture_path("mid1950_db.txt"))


@pytest.fixture(scope="session")
def case1():
    return read_cases(fixture_path("case1.json"))[0]


@pytest.fixture(scope="session")
def case2():
    return read_cases(fixture_path("case2.json"))[0]

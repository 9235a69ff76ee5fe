import numpy as np
import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from qlga import schemas


@pytest.fixture(scope="session")
def validate():
    store = schemas.load_all()
    registry = Registry().with_resources(
        (uri, Resource.from_contents(s)) for uri, s in store.items()
    )

    def check(report, name):
        schema = schemas.load(name)
        Draft202012Validator(schema, registry=registry).validate(report)

    return check


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


def random_state_amps(rng, N):
    amps = rng.normal(size=(N, 2)) + 1j * rng.normal(size=(N, 2))
    return amps / np.linalg.norm(amps)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

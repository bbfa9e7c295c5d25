import numpy as np
import pytest

from graphiq.landmarks import MOUTH_WIDTH, synthesize_face

DATA_SEED = 7
NOISE = 0.03 * MOUTH_WIDTH


def make_dataset(seed=DATA_SEED, per_class=20, noise=NOISE):
    rng = np.random.default_rng(seed)
    return [synthesize_face(kind, noise, rng) for kind in ("happy", "sad") for _ in range(per_class)]


@pytest.fixture(scope="session")
def dataset():
    return make_dataset()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

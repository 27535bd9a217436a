import os

# must be set before kahlerot.config picks the config directory
os.environ.setdefault("TESTING", "1")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from kahlerot.potentials import catalog  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def multinomial():
    return catalog("multinomial")


@pytest.fixture(scope="session")
def neg_multinomial():
    return catalog("neg-multinomial")


@pytest.fixture(scope="session")
def normal_half_plane():
    return catalog("normal-half-plane")


@pytest.fixture(scope="session")
def quadratic():
    return catalog("quadratic")


@pytest.fixture
def sample_box(rng):
    """Uniform points from a spec's sampling box."""

    def draw(spec, count):
        box = np.asarray(spec.box)
        return box[:, 0] + (box[:, 1] - box[:, 0]) * rng.random((count, spec.n))

    return draw

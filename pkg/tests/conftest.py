import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_unit_matrix(rng, rows, dim):
    """Random unit-normalized EmbeddingMatrix helper shared across tests."""
    from simfuse.embedstore import EmbeddingMatrix, l2_normalize

    return l2_normalize(
        EmbeddingMatrix(rng.standard_normal((rows, dim), dtype=np.float32))
    )

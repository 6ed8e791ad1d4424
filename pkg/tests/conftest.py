import numpy as np
import pytest

from privcore import TrainConfig, gen_hierarchical


@pytest.fixture(scope="session")
def small_hier():
    # 3 coarse x 2 fine, 12 rows per fine class: big enough to train on,
    # small enough that classifier tests stay fast.
    return gen_hierarchical(
        seed=0,
        num_coarse=3,
        fine_per_coarse=2,
        per_fine_count=12,
        d=8,
        coarse_sep=4.0,
        fine_sep=2.5,
        within_sd=1.0,
    )


@pytest.fixture(scope="session")
def fast_train():
    return TrainConfig(epochs=3, learning_rate=0.1, batch_size=16, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest
import torch

from umetrain.config import TrainerConfig


@pytest.fixture
def cfg():
    return TrainerConfig(k_neighbors=4, feature_channels=8, embed_dim=16, n_heads=2)


@pytest.fixture
def rng():
    return np.random.default_rng(77)


@pytest.fixture
def make_pair(rng):
    """Factory for batch-of-one synthetic canonical pairs."""

    def _make(n=32, k=8, dtype=torch.float64):
        c1 = torch.as_tensor(rng.normal(size=(1, n, 3)), dtype=dtype)
        c2 = torch.as_tensor(rng.normal(size=(1, n, 3)), dtype=dtype)
        f1 = torch.as_tensor(rng.uniform(0.1, 1.0, size=(1, n, k)), dtype=dtype)
        f2 = torch.as_tensor(rng.uniform(0.1, 1.0, size=(1, n, k)), dtype=dtype)
        return c1, f1, c2, f2

    return _make

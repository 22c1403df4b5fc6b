from typing import Callable

import numpy as np
import pytest
from kestrel.core.estimation import GaussianBelief, LinearGaussianModel


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def scalar_model() -> Callable[..., LinearGaussianModel]:
    """Factory of 1-D models, `scalar_model(a=1, h=1, q=0, r=1)`."""

    def make(a: float = 1.0, h: float = 1.0, q: float = 0.0, r: float = 1.0) -> LinearGaussianModel:
        return LinearGaussianModel(transition=[[a]], observation=[[h]], process_noise=[[q]], measurement_noise=[[r]])

    return make


@pytest.fixture
def scalar_belief() -> Callable[..., GaussianBelief]:
    def make(mean: float = 0.0, variance: float = 1.0) -> GaussianBelief:
        return GaussianBelief(mean=[mean], covariance=[[variance]])

    return make

"""Shared fixtures: seeded generators and random valid models."""

import numpy as np
import pytest

from krige._random import make_rng
from krige.model_core import CorrelationMatrix, KrigeModel, gamma_from_sigma_r


def random_correlation(rng: np.random.Generator, n: int, floor: float = 0.2) -> np.ndarray:
    """Well-conditioned correlation matrix from a random Gram matrix plus a ridge."""
    a = rng.standard_normal((n, n + 2))
    s = a @ a.T + floor * n * np.eye(n)
    d = np.sqrt(np.diag(s))
    r = s / np.outer(d, d)
    np.fill_diagonal(r, 1.0)
    return 0.5 * (r + r.T)


@pytest.fixture
def rng():
    return make_rng(20240601)


@pytest.fixture
def random_model(rng):
    """Factory for (sigma2, R, KrigeModel) triples of dimension n."""

    def build(n: int, sigma2: float = 2.5, mu: float = 0.0):
        r = random_correlation(rng, n)
        gamma = gamma_from_sigma_r(sigma2, CorrelationMatrix(r))
        return sigma2, r, KrigeModel(mu=mu, sigma2=sigma2, gamma=gamma)

    return build


def swap2():
    """Γ = [[0, 1], [1, 0]], the variogram of Σ = I₂ at σ² = 1."""
    return np.array([[0.0, 1.0], [1.0, 0.0]])


def zero_diagonal_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    h = rng.standard_normal((n, n))
    h = h + h.T
    np.fill_diagonal(h, 0.0)
    return h

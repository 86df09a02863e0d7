#!/usr/bin/env python3
"""
Projection - The span(1)⊥ Representation
========================================
Σ₀ = -PΓP with P = I - (1/n)11', the empirical variogram estimator, the
two-step estimation algorithm (center each sample, estimate Γ on the
projected data, estimate μ by the grand mean), and simulation of
fields with a prescribed variogram as N(0, Σ₀) draws.

Σ₀ is always singular (its kernel contains 1). Its diagonal is constant
only when R has constant row sums, so constancy is reported by
`sigma0_diagnostics` rather than enforced.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy import linalg

from config import config
from krige import _linalg as la
from krige._random import make_rng
from krige.errors import InvalidInput, NotConditionallyNegDef
from krige.log import get_logger
from krige.model_core import VariogramMatrix, min_sigma2

log = get_logger(__name__)

KERNEL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SampleSet:
    """N independent observation vectors of length n, stored as an (N, n) array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidInput(f"samples must be a non-empty (N, n) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("samples contain non-finite values")
        object.__setattr__(self, 'data', la.frozen(arr))

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True, eq=False)
class CenteredCovariance:
    """PSD matrix Σ₀ supported by span(1)⊥ (Σ₀1 = 0)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = la.as_square(self.entries, "centered covariance")
        if la.asymmetry(arr) > KERNEL_TOL * max(1.0, float(np.max(np.abs(arr)))):
            raise InvalidInput("centered covariance is not symmetric")
        arr = la.symmetrize(arr)
        eig = linalg.eigvalsh(arr)
        if eig[0] < -la.scaled_tol(eig):
            raise InvalidInput(f"centered covariance is not PSD (eigenvalue {eig[0]:.6g})")
        kernel = float(np.max(np.abs(arr.sum(axis=1))))
        if kernel > KERNEL_TOL * max(1.0, float(np.max(np.abs(arr)))):
            raise InvalidInput(f"centered covariance does not annihilate 1 (|Σ₀1| = {kernel:.3g})")
        object.__setattr__(self, 'entries', la.frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


class ModelEstimate(NamedTuple):
    mu_hat: float
    gamma_hat: VariogramMatrix


def _samples(samples) -> SampleSet:
    return samples if isinstance(samples, SampleSet) else SampleSet(samples)


def centering_projector(n: int) -> np.ndarray:
    """P = I - (1/n)11', the orthogonal projector onto span(1)⊥."""
    if int(n) != n or n < 2:
        raise InvalidInput(f"dimension must be an integer >= 2, got {n}")
    return la.centering_matrix(int(n))


def sigma0_from_gamma(gamma) -> CenteredCovariance:
    """Σ₀ = -PΓP."""
    g = gamma.entries if isinstance(gamma, VariogramMatrix) else VariogramMatrix(gamma).entries
    p = centering_projector(g.shape[0])
    s0 = la.symmetrize(-(p @ g @ p))
    eig = linalg.eigvalsh(s0)
    tol = la.scaled_tol(eig)
    if eig[0] < -tol:
        raise NotConditionallyNegDef(-eig[0], tol)
    return CenteredCovariance(s0)


def variogram_of(sigma) -> VariogramMatrix:
    """γᵢⱼ = ½(eᵢ - eⱼ)'Σ(eᵢ - eⱼ) for any symmetric PSD Σ."""
    s = sigma.entries if hasattr(sigma, 'entries') else la.as_square(sigma, "covariance")
    if la.asymmetry(s) > 1e-10 * max(1.0, float(np.max(np.abs(s)))):
        raise InvalidInput("covariance is not symmetric")
    s = la.symmetrize(s)
    eig = linalg.eigvalsh(s)
    if eig[0] < -la.scaled_tol(eig):
        raise InvalidInput(f"covariance is not PSD (eigenvalue {eig[0]:.6g})")
    d = np.diag(s)
    g = 0.5 * (d[:, None] + d[None, :]) - s
    np.fill_diagonal(g, 0.0)
    return VariogramMatrix(np.maximum(g, 0.0))


def sigma0_diagnostics(sigma0) -> dict:
    s0 = sigma0.entries if isinstance(sigma0, CenteredCovariance) else CenteredCovariance(sigma0).entries
    d = np.diag(s0)
    eig = linalg.eigvalsh(s0)
    tol = la.scaled_tol(eig)
    return {
        'diagonal_spread': float(d.max() - d.min()),
        'kernel_residual': float(np.max(np.abs(s0.sum(axis=1)))),
        'min_eigenvalue': float(eig[0]),
        'rank': int(np.sum(eig > tol)),
    }


# ==================== SAMPLES ====================

def project_samples(samples) -> SampleSet:
    """Subtract each vector's own component mean: ŷ_k = P y_k."""
    s = _samples(samples)
    return SampleSet(s.data - s.data.mean(axis=1, keepdims=True))


def split_samples(samples) -> Tuple[SampleSet, np.ndarray]:
    """Y = Ŷ + Ȳ: the projected part and each vector's component mean."""
    s = _samples(samples)
    means = s.data.mean(axis=1)
    return SampleSet(s.data - means[:, None]), means


def empirical_variogram(samples) -> VariogramMatrix:
    """γ̂ᵢⱼ = (1/2N) Σ_k (y_ki - y_kj)²."""
    s = _samples(samples)
    y = s.data
    g = np.empty((s.n, s.n))
    for i in range(s.n):
        diff = y - y[:, [i]]
        g[i] = np.einsum('kj,kj->j', diff, diff) / (2.0 * s.count)
    g = la.symmetrize(g)
    np.fill_diagonal(g, 0.0)
    return VariogramMatrix(g)


def estimate_model(samples) -> ModelEstimate:
    """(grand mean, empirical variogram of the projected samples)."""
    s = _samples(samples)
    mu_hat = float(s.data.mean())
    gamma_hat = empirical_variogram(project_samples(s))
    log.info(f"Estimated mu={mu_hat:.6g} from N={s.count} samples of n={s.n}")
    return ModelEstimate(mu_hat=mu_hat, gamma_hat=gamma_hat)


def estimate_sigma2(samples, mu_hat: float, gamma_hat: VariogramMatrix) -> Tuple[float, List[str]]:
    """
    Pooled variance around mu_hat, lifted to min_sigma2(gamma_hat) * (1 + margin)
    when smaller so that σ²11' - Γ̂ is positive definite.

    At min_sigma2 itself σ²11' - Γ̂ is singular along the maximiser of x'Γ̂x.
    """
    s = _samples(samples)
    pooled = float(np.mean((s.data - mu_hat) ** 2))
    floor = min_sigma2(gamma_hat)
    target = floor * (1.0 + config.SIGMA_LIFT_MARGIN)
    warnings = []
    if pooled < target:
        warnings.append(f"SigmaLifted: pooled variance {pooled:.6g} raised to {target:.6g} "
                        f"(min_sigma2 {floor:.6g})")
        log.warning(warnings[-1])
    sigma2 = max(pooled, target)
    if sigma2 <= 0:
        warnings.append("Degenerate: all samples are constant, sigma2 set to 1")
        log.warning(warnings[-1])
        sigma2 = 1.0
    return sigma2, warnings


def simulate_field(gamma, count: int, rng_seed: int) -> SampleSet:
    """count draws of N(0, Σ₀) via the symmetric PSD square root of Σ₀."""
    if int(count) != count or count < 1:
        raise InvalidInput(f"count must be a positive integer, got {count}")
    s0 = sigma0_from_gamma(gamma).entries
    eig, vecs = linalg.eigh(s0)
    root = (vecs * np.sqrt(np.clip(eig, 0.0, None))) @ vecs.T
    z = make_rng(rng_seed).standard_normal((int(count), s0.shape[0]))
    data = z @ root
    data -= data.mean(axis=1, keepdims=True)
    return SampleSet(data)

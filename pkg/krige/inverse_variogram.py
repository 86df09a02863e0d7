#!/usr/bin/env python3
"""
Inverse Variogram - Sherman-Morrison Machinery
==============================================
Rank-one update formulas for 11' - A, the inverse variogram and the
concentration matrix expressed through each other, the Gaussian
log-likelihood in (σ², Γ) coordinates, its directional derivatives along
zero-diagonal symmetric directions H, and the normal-equation residual.

Concentration from Γ
--------------------
Two scalars for the rank-one correction of Σ⁻¹ = -Γ⁻¹ - s⁻¹ Γ⁻¹11'Γ⁻¹
circulate: s = σ⁻² - 1'Γ⁻¹1 and s = σ² - 1'Γ⁻¹1. Both are implemented
(`CONCENTRATION_SCALAR_FORMS`) and checked against direct inversion on random
instances in tests/test_inverse_variogram.py. Only the σ⁻² form reproduces
the direct inverse (the two coincide at σ² = 1 only); it is the default and
the only one the rest of the package uses.
"""

import math
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, NamedTuple

import numpy as np
from scipy import linalg

from config import config
from krige import _linalg as la
from krige.errors import InvalidInput, NotInvertible, SingularInput, SingularModel
from krige.log import get_logger
from krige.model_core import (
    CorrelationMatrix,
    CovarianceMatrix,
    KrigeModel,
    VariogramMatrix,
    correlation_from_gamma,
)
from krige.projection import SampleSet

log = get_logger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
ADJUGATE_MAX_N = 6

CONCENTRATION_SCALAR_FORMS: Dict[str, Callable[[float], float]] = {
    'inverse': lambda sigma2: 1.0 / sigma2,
    'direct': lambda sigma2: sigma2,
}


@dataclass(frozen=True)
class CorrelationDiagnostics:
    """Spectral scalars of a nonsingular correlation matrix."""

    trace_r: float
    det_r: float
    trace_r_inv: float
    one_rinv_one: float

    @property
    def distance_from_one(self) -> float:
        return abs(self.one_rinv_one - 1.0)

    def to_dict(self) -> dict:
        out = asdict(self)
        out['distance_from_one'] = self.distance_from_one
        return out


@dataclass(frozen=True)
class LikelihoodEval:
    """log p(y | μ, σ², Γ) split into its log-determinant and quadratic parts."""

    loglik: float
    logdet_term: float
    quad_term: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)


class MLResidual(NamedTuple):
    matrix: np.ndarray
    offdiag_norm: float


# ==================== SHERMAN-MORRISON ====================

def sm_det(a) -> float:
    """det(11' - A) = (-1)ⁿ (1 - 1'A⁻¹1) det A."""
    a = la.as_square(a, "A")
    n = a.shape[0]
    la.guard(a, "A")
    c = float(np.sum(linalg.solve(a, np.ones(n))))
    return (-1.0) ** n * (1.0 - c) * float(linalg.det(a))


def sm_inverse(a) -> np.ndarray:
    """(11' - A)⁻¹ = -A⁻¹ - (1 - 1'A⁻¹1)⁻¹ A⁻¹11'A⁻¹."""
    a = la.as_square(a, "A")
    a_inv = la.inverse(a, "A")
    u = a_inv.sum(axis=1)
    v = a_inv.sum(axis=0)
    s = 1.0 - float(u.sum())
    if abs(s) < config.SM_SCALAR_TOL:
        raise NotInvertible(s)
    return -a_inv - np.outer(u, v) / s


def correlation_diagnostics(r) -> CorrelationDiagnostics:
    if not isinstance(r, CorrelationMatrix):
        r = CorrelationMatrix(r)
    eig, vecs = linalg.eigh(r.entries)
    rc = float(eig[0] / eig[-1]) if eig[0] > 0 else 0.0
    if not rc > config.RCOND_MIN:
        raise SingularInput(rc, "correlation matrix")
    proj = vecs.T @ np.ones(r.n)
    return CorrelationDiagnostics(
        trace_r=float(np.trace(r.entries)),
        det_r=float(np.prod(eig)),
        trace_r_inv=float(np.sum(1.0 / eig)),
        one_rinv_one=float(np.sum(proj ** 2 / eig)),
    )


def gamma_inverse(sigma) -> np.ndarray:
    """Γ⁻¹ = -Σ⁻¹ - (σ⁻² - 1'Σ⁻¹1)⁻¹ Σ⁻¹11'Σ⁻¹ with Γ = σ²11' - Σ."""
    if not isinstance(sigma, CovarianceMatrix):
        sigma = CovarianceMatrix(sigma)
    sigma2 = sigma.sigma2
    s_inv = la.inverse(sigma.entries, "covariance matrix")
    u = s_inv.sum(axis=1)
    c = float(u.sum())
    scalar = 1.0 / sigma2 - c
    # scalar·σ² = 1 - 1'R⁻¹1
    if abs(scalar * sigma2) < config.SM_SCALAR_TOL:
        raise NotInvertible(scalar)
    return -s_inv - np.outer(u, u) / scalar


def concentration_from_gamma(gamma, sigma2: float, scalar_form: str = 'inverse') -> np.ndarray:
    """Σ⁻¹ = -Γ⁻¹ - s⁻¹ Γ⁻¹11'Γ⁻¹, s chosen by `scalar_form` (see module docs)."""
    if scalar_form not in CONCENTRATION_SCALAR_FORMS:
        raise InvalidInput(f"unknown scalar form '{scalar_form}'")
    if not isinstance(gamma, VariogramMatrix):
        gamma = VariogramMatrix(gamma)
    correlation_from_gamma(sigma2, gamma)
    g_inv = la.inverse(gamma.entries, "variogram matrix")
    u = g_inv.sum(axis=1)
    c = float(u.sum())
    lead = CONCENTRATION_SCALAR_FORMS[scalar_form](sigma2)
    scalar = lead - c
    if abs(scalar) < config.SM_SCALAR_TOL * max(1.0, abs(lead), abs(c)):
        raise NotInvertible(scalar)
    return -g_inv - np.outer(u, u) / scalar


# ==================== LIKELIHOOD ====================

def _factor(sigma: np.ndarray):
    la.guard(sigma, exc=SingularModel)
    try:
        return linalg.cho_factor(sigma, lower=True)
    except linalg.LinAlgError:
        raise SingularModel(la.rcond(sigma))


def _evaluate(resid: np.ndarray, cho, logdet: float) -> LikelihoodEval:
    n = resid.shape[0]
    quad = float(resid @ linalg.cho_solve(cho, resid))
    return LikelihoodEval(
        loglik=-0.5 * n * LOG_2PI - 0.5 * logdet - 0.5 * quad,
        logdet_term=logdet,
        quad_term=quad,
        n=n,
    )


def _observation(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != n:
        raise InvalidInput(f"observation has length {y.shape[0]}, model has n={n}")
    if not np.all(np.isfinite(y)):
        raise InvalidInput("observation has non-finite entries")
    return y


def loglik(y, model: KrigeModel) -> LikelihoodEval:
    """Gaussian log-density of y under N(μ1, σ²11' - Γ)."""
    y = _observation(y, model.n)
    cho = _factor(model.sigma2 - model.gamma.entries)
    logdet = 2.0 * float(np.sum(np.log(np.diag(cho[0]))))
    return _evaluate(y - model.mu, cho, logdet)


def loglik_samples(samples: SampleSet, model: KrigeModel) -> List[LikelihoodEval]:
    """Per-observation log-likelihoods, factorizing Σ once."""
    if samples.n != model.n:
        raise InvalidInput(f"samples have n={samples.n}, model has n={model.n}")
    cho = _factor(model.sigma2 - model.gamma.entries)
    logdet = 2.0 * float(np.sum(np.log(np.diag(cho[0]))))
    return [_evaluate(row - model.mu, cho, logdet) for row in samples.data]


def quadform_via_gamma(y, gamma, sigma2: float) -> float:
    """y'Σ⁻¹y = -y'Γ⁻¹y - (σ⁻² - 1'Γ⁻¹1)⁻¹ (y'Γ⁻¹1)²."""
    if not isinstance(gamma, VariogramMatrix):
        gamma = VariogramMatrix(gamma)
    y = _observation(y, gamma.n)
    g_inv = la.inverse(gamma.entries, "variogram matrix")
    gy = g_inv @ y
    c = float(g_inv.sum())
    return float(-y @ gy - (y @ g_inv.sum(axis=1)) ** 2 / (1.0 / sigma2 - c))


def adjugate(a) -> np.ndarray:
    """Adjugate by cofactors; limited to n <= 6."""
    a = la.as_square(a, "matrix")
    n = a.shape[0]
    if n > ADJUGATE_MAX_N:
        raise InvalidInput(f"adjugate is only evaluated for n <= {ADJUGATE_MAX_N}, got {n}")
    if n == 1:
        return np.ones((1, 1))
    cof = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
            cof[i, j] = (-1.0) ** (i + j) * linalg.det(minor)
    return cof.T


def det_via_adjugate(gamma, sigma2: float) -> float:
    """det(σ²11' - Γ) = det(-Γ) + σ² 1'adj(-Γ)1 (matrix determinant lemma)."""
    g = gamma.entries if isinstance(gamma, VariogramMatrix) else la.as_square(gamma)
    neg = -g
    return float(linalg.det(neg) + sigma2 * np.sum(adjugate(neg)))


# ==================== DERIVATIVES ====================

def _direction(h, n: int) -> np.ndarray:
    h = la.as_square(h, "direction H")
    if h.shape[0] != n:
        raise InvalidInput(f"direction H has dimension {h.shape[0]}, expected {n}")
    if la.asymmetry(h) > config.SYM_TOL or np.max(np.abs(np.diag(h))) > config.DIAG_TOL:
        raise InvalidInput("direction H must be symmetric with zero diagonal")
    return h


def _model_inverse(gamma, sigma2: float) -> np.ndarray:
    g = gamma.entries if isinstance(gamma, VariogramMatrix) else la.as_square(gamma)
    return la.inverse(sigma2 - g, exc=SingularModel)


def d_logdet(gamma, sigma2: float, h) -> float:
    """Derivative of Γ ↦ log det(11' - σ⁻²Γ) along H: -tr((σ²11' - Γ)⁻¹H)."""
    s_inv = _model_inverse(gamma, sigma2)
    h = _direction(h, s_inv.shape[0])
    return -float(np.sum(s_inv * h))


def d_quadform(y, gamma, sigma2: float, h) -> float:
    """Derivative of Γ ↦ y'(11' - σ⁻²Γ)⁻¹y along H: σ² tr(Σ⁻¹yy'Σ⁻¹H)."""
    s_inv = _model_inverse(gamma, sigma2)
    n = s_inv.shape[0]
    h = _direction(h, n)
    z = s_inv @ _observation(y, n)
    return float(sigma2 * (z @ h @ z))


def ml_residual(samples, gamma, sigma2: float) -> MLResidual:
    """
    -Σ⁻¹ + Σ⁻¹ S Σ⁻¹ with S the average of y y' over (centered) samples.

    The mean per-sample log-likelihood has derivative -M_ij along
    H = eᵢeⱼ' + eⱼeᵢ', so an off-diagonal norm of 0 is stationarity in every
    zero-diagonal direction.
    """
    if not isinstance(samples, SampleSet):
        samples = SampleSet(samples)
    s_inv = _model_inverse(gamma, sigma2)
    if samples.n != s_inv.shape[0]:
        raise InvalidInput(f"samples have n={samples.n}, model has n={s_inv.shape[0]}")
    second = samples.data.T @ samples.data / samples.count
    m = la.symmetrize(-s_inv + s_inv @ second @ s_inv)
    off = m - np.diag(np.diag(m))
    return MLResidual(matrix=m, offdiag_norm=float(np.max(np.abs(off))))

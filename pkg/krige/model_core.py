#!/usr/bin/env python3
"""
Model Core - Variogram Parameterization
=======================================
Domain types and the parameter bijection

    Σ  <->  (σ², Γ)  <->  (σ², R),    Γ = σ²(11' - R) = σ²11' - Σ

together with the three-condition validity check for variogram matrices:
symmetric with zero diagonal, conditionally negative definite, and
sup{x'Γx : x'1 = 1} <= σ².

All values are immutable after construction; every function is pure.
"""

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg

from config import config
from krige import _linalg as la
from krige.errors import InvalidInput, NotConditionallyNegDef, SigmaTooSmall, Unbounded
from krige.log import get_logger

log = get_logger(__name__)

MatrixLike = Union[np.ndarray, list, "CorrelationMatrix", "CovarianceMatrix", "VariogramMatrix"]


def _raw(a: MatrixLike, name: str = "matrix") -> np.ndarray:
    if isinstance(a, (CorrelationMatrix, CovarianceMatrix, VariogramMatrix)):
        return a.entries
    return la.as_square(a, name)


def _check_dimension(arr: np.ndarray, name: str):
    if arr.shape[0] < 2:
        raise InvalidInput(f"{name} must have dimension n >= 2, got {arr.shape[0]}")


def _check_symmetric(arr: np.ndarray, name: str):
    asym = la.asymmetry(arr)
    if asym > config.SYM_TOL:
        raise InvalidInput(f"{name} is not symmetric (max asymmetry {asym:.3g})")


# ==================== DOMAIN TYPES ====================

@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Unit-diagonal positive semidefinite matrix R (a point of the elliptope)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = la.as_square(self.entries, "correlation matrix")
        _check_dimension(arr, "correlation matrix")
        _check_symmetric(arr, "correlation matrix")
        diag_dev = float(np.max(np.abs(np.diag(arr) - 1.0)))
        if diag_dev > config.DIAG_TOL:
            raise InvalidInput(f"correlation matrix diagonal deviates from 1 by {diag_dev:.3g}")
        arr = la.symmetrize(arr)
        np.fill_diagonal(arr, 1.0)
        if np.max(np.abs(arr)) > 1.0 + config.DIAG_TOL:
            raise InvalidInput("correlation entries must lie in [-1, 1]")
        arr = np.clip(arr, -1.0, 1.0)
        eig = linalg.eigvalsh(arr)
        if eig[0] < -la.scaled_tol(eig):
            raise InvalidInput(f"correlation matrix is not PSD (eigenvalue {eig[0]:.6g})")
        object.__setattr__(self, 'entries', la.frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """PSD matrix Σ with constant diagonal σ² (a member of 𝕊₌)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = la.as_square(self.entries, "covariance matrix")
        _check_dimension(arr, "covariance matrix")
        _check_symmetric(arr, "covariance matrix")
        arr = la.symmetrize(arr)
        diag = np.diag(arr)
        spread = float(np.max(np.abs(diag - diag.mean())))
        if spread > config.DIAG_TOL:
            raise InvalidInput(f"covariance diagonal is not constant (spread {spread:.3g})")
        eig = linalg.eigvalsh(arr)
        if eig[0] < -la.scaled_tol(eig):
            raise InvalidInput(f"covariance matrix is not PSD (eigenvalue {eig[0]:.6g})")
        object.__setattr__(self, 'entries', la.frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def sigma2(self) -> float:
        return float(np.trace(self.entries)) / self.n


@dataclass(frozen=True, eq=False)
class VariogramMatrix:
    """Symmetric, zero-diagonal, nonnegative, conditionally negative definite Γ."""

    entries: np.ndarray

    def __post_init__(self):
        arr = la.as_square(self.entries, "variogram matrix")
        _check_dimension(arr, "variogram matrix")
        _check_symmetric(arr, "variogram matrix")
        max_diag = float(np.max(np.abs(np.diag(arr))))
        if max_diag > config.DIAG_TOL:
            raise InvalidInput(f"variogram matrix diagonal is not zero (max |γii| = {max_diag:.3g})")
        arr = la.symmetrize(arr)
        np.fill_diagonal(arr, 0.0)
        if np.min(arr) < -config.SYM_TOL:
            raise InvalidInput(f"variogram entries must be nonnegative (min {np.min(arr):.6g})")
        arr = np.maximum(arr, 0.0)
        top, tol = projected_spectrum_top(arr)
        if top > tol:
            raise NotConditionallyNegDef(top, tol)
        object.__setattr__(self, 'entries', la.frozen(arr))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_zero(self) -> bool:
        return not np.any(self.entries)


@dataclass(frozen=True, eq=False)
class KrigeModel:
    """The triple (μ, σ², Γ) defining N(μ1, σ²R) with R = 11' - σ⁻²Γ."""

    mu: float
    sigma2: float
    gamma: VariogramMatrix

    def __post_init__(self):
        if not np.isfinite(self.mu):
            raise InvalidInput("mu must be finite")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise InvalidInput(f"sigma2 must be positive, got {self.sigma2}")
        if not isinstance(self.gamma, VariogramMatrix):
            object.__setattr__(self, 'gamma', VariogramMatrix(self.gamma))
        object.__setattr__(self, 'mu', float(self.mu))
        object.__setattr__(self, 'sigma2', float(self.sigma2))
        _require_sigma(self.sigma2, self.gamma)
        # R must itself be a valid correlation matrix
        CorrelationMatrix(1.0 - self.gamma.entries / self.sigma2)

    @property
    def n(self) -> int:
        return self.gamma.n

    @property
    def covariance(self) -> CovarianceMatrix:
        return CovarianceMatrix(self.sigma2 - self.gamma.entries)

    @property
    def correlation(self) -> CorrelationMatrix:
        return CorrelationMatrix(1.0 - self.gamma.entries / self.sigma2)


@dataclass
class ValidityReport:
    """Outcome of the three-condition variogram check. Failures are data, not errors."""

    n: int
    symmetric_zero_diagonal: bool
    max_asymmetry: float
    max_abs_diagonal: float
    nonnegative_entries: bool
    min_entry: float
    conditionally_negative_definite: bool
    max_projected_eigenvalue: float
    cnd_tol: float
    sigma2: Optional[float] = None
    sigma_bound: Optional[bool] = None
    min_sigma2: Optional[float] = None
    one_gamma_one: float = 0.0
    warnings: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        ok = (self.symmetric_zero_diagonal and self.nonnegative_entries
              and self.conditionally_negative_definite)
        return ok and self.sigma_bound is not False

    def failures(self) -> List[str]:
        out = []
        if not self.symmetric_zero_diagonal:
            out.append(f"condition 1: symmetric zero diagonal (max asymmetry {self.max_asymmetry:.3g}, "
                       f"max |diagonal| {self.max_abs_diagonal:.3g})")
        if not self.conditionally_negative_definite:
            out.append(f"condition 2: conditionally negative definite "
                       f"(eigenvalue {self.max_projected_eigenvalue:.6g} of PΓP)")
        if self.sigma_bound is False:
            out.append(f"condition 3: sigma2={self.sigma2} below min_sigma2={self.min_sigma2}")
        if not self.nonnegative_entries:
            out.append(f"nonnegative entries (min entry {self.min_entry:.6g})")
        return out

    def to_dict(self) -> dict:
        out = asdict(self)
        out['valid'] = self.valid
        out['failures'] = self.failures()
        return out


# ==================== OPERATIONS ====================

def projected_spectrum_top(gamma: np.ndarray) -> Tuple[float, float]:
    """Largest eigenvalue of PΓP and the tolerance it is judged against."""
    p = la.centering_matrix(gamma.shape[0])
    eig = linalg.eigvalsh(la.symmetrize(p @ gamma @ p))
    return float(eig[-1]), la.scaled_tol(eig)


def gamma_from_sigma_r(sigma2: float, r: MatrixLike) -> VariogramMatrix:
    """Γ = σ²(11' - R)."""
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise InvalidInput(f"sigma2 must be positive, got {sigma2}")
    if not isinstance(r, CorrelationMatrix):
        r = CorrelationMatrix(_raw(r, "correlation matrix"))
    return VariogramMatrix(sigma2 * (1.0 - r.entries))


def min_sigma2(gamma: MatrixLike) -> float:
    """
    sup{x'Γx : x'1 = 1}, the smallest common variance admissible for Γ.

    The quadratic is concave on the hyperplane (PΓP ⪯ 0), so the stationary
    point of the bordered system [Γ 1; 1' 0][x; λ] = [0; 1] is the maximiser.
    A singular bordered system falls back to the reduced problem on an
    orthonormal basis of span(1)⊥, solved with a pseudo-inverse.
    """
    g = _raw(gamma, "variogram matrix")
    if not isinstance(gamma, VariogramMatrix):
        top, tol = projected_spectrum_top(la.symmetrize(g))
        if top > tol:
            raise NotConditionallyNegDef(top, tol)
    n = g.shape[0]
    ones = np.ones(n)

    bordered = np.zeros((n + 1, n + 1))
    bordered[:n, :n] = g
    bordered[:n, n] = bordered[n, :n] = 1.0
    if la.rcond(bordered) > config.RCOND_MIN:
        rhs = np.zeros(n + 1)
        rhs[n] = 1.0
        x = linalg.solve(bordered, rhs)[:n]
        return max(float(x @ g @ x), 0.0)

    basis = linalg.null_space(ones[None, :])
    q = la.symmetrize(basis.T @ g @ basis)
    grad = basis.T @ g @ ones / n
    w = -linalg.pinvh(q) @ grad
    residual = float(np.linalg.norm(q @ w + grad))
    if residual > 1e3 * config.PSD_REL_TOL * max(1.0, float(np.linalg.norm(grad))):
        raise Unbounded("x'Γx is unbounded above on the hyperplane x'1 = 1")
    value = ones @ g @ ones / n ** 2 + 2.0 * grad @ w + w @ q @ w
    return max(float(value), 0.0)


def _sigma_slack(ms: float) -> float:
    return config.PSD_REL_TOL * max(1.0, ms)


def _require_sigma(sigma2: float, gamma: MatrixLike) -> float:
    ms = min_sigma2(gamma)
    if sigma2 < ms - _sigma_slack(ms):
        raise SigmaTooSmall(ms, sigma2)
    return ms


def covariance_from_gamma(sigma2: float, gamma: MatrixLike) -> CovarianceMatrix:
    """Σ = σ²11' - Γ; requires σ² >= min_sigma2(Γ)."""
    if not isinstance(gamma, VariogramMatrix):
        gamma = VariogramMatrix(_raw(gamma, "variogram matrix"))
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise InvalidInput(f"sigma2 must be positive, got {sigma2}")
    _require_sigma(sigma2, gamma)
    return CovarianceMatrix(sigma2 - gamma.entries)


def correlation_from_gamma(sigma2: float, gamma: MatrixLike) -> CorrelationMatrix:
    """R = 11' - σ⁻²Γ; requires σ² >= min_sigma2(Γ)."""
    if not isinstance(gamma, VariogramMatrix):
        gamma = VariogramMatrix(_raw(gamma, "variogram matrix"))
    if not (np.isfinite(sigma2) and sigma2 > 0):
        raise InvalidInput(f"sigma2 must be positive, got {sigma2}")
    _require_sigma(sigma2, gamma)
    return CorrelationMatrix(1.0 - gamma.entries / sigma2)


def decompose_covariance(sigma: MatrixLike) -> Tuple[float, CorrelationMatrix]:
    """Σ -> (tr Σ / n, Σ / (tr Σ / n))."""
    if not isinstance(sigma, CovarianceMatrix):
        sigma = CovarianceMatrix(_raw(sigma, "covariance matrix"))
    sigma2 = sigma.sigma2
    if not sigma2 > 0:
        raise InvalidInput(f"covariance trace must be positive, got {sigma2 * sigma.n}")
    return sigma2, CorrelationMatrix(sigma.entries / sigma2)


def validate_variogram(gamma, sigma2: Optional[float] = None) -> ValidityReport:
    """Check the three variogram conditions plus entry nonnegativity."""
    raw = la.as_square(gamma, "variogram matrix")
    n = raw.shape[0]
    asym = la.asymmetry(raw)
    max_diag = float(np.max(np.abs(np.diag(raw)))) if n else 0.0
    sym = la.symmetrize(raw)
    min_entry = float(np.min(sym - np.diag(np.diag(sym)))) if n > 1 else 0.0
    top, tol = projected_spectrum_top(sym)

    report = ValidityReport(
        n=n,
        symmetric_zero_diagonal=asym <= config.SYM_TOL and max_diag <= config.DIAG_TOL,
        max_asymmetry=asym,
        max_abs_diagonal=max_diag,
        nonnegative_entries=min_entry >= -config.SYM_TOL,
        min_entry=min_entry,
        conditionally_negative_definite=top <= tol,
        max_projected_eigenvalue=top,
        cnd_tol=tol,
        sigma2=None if sigma2 is None else float(sigma2),
        one_gamma_one=float(np.sum(sym)),
    )

    if report.conditionally_negative_definite:
        try:
            report.min_sigma2 = min_sigma2(sym)
        except Unbounded as e:
            report.warnings.append(f"Unbounded: {e}")

    if sigma2 is not None:
        ms = report.min_sigma2
        report.sigma_bound = bool(
            sigma2 > 0 and ms is not None and sigma2 >= ms - _sigma_slack(ms)
        )

    if n and not np.any(sym):
        report.warnings.append("Degenerate: Γ = 0 corresponds to R = 11' (full correlation)")

    for w in report.warnings:
        log.warning(w)
    return report

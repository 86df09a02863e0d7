#!/usr/bin/env python3
"""
Kriging - Prediction at Untried Locations
=========================================
Variogram functions with Nugget / Sill / Range, variogram matrices built
from Euclidean distances between locations, and the plug-in Kriging
predictor with its prediction variance.

Families use the practical-range convention: γ(range) ≈ 0.95·(sill - nugget)
+ nugget for the exponential and gaussian shapes, and γ(d) = sill for
d >= range in the spherical shape. γ(0) = 0 always; the nugget is the
right-limit at 0.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, NamedTuple, Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from config import config
from krige import _linalg as la
from krige.errors import InvalidInput, InvalidVariogram
from krige.log import get_logger
from krige.model_core import CovarianceMatrix, ValidityReport, VariogramMatrix, validate_variogram

log = get_logger(__name__)

VARIANCE_CLAMP_TOL = 1e-10


class VariogramFamily(str, Enum):
    EXPONENTIAL = 'exponential'
    GAUSSIAN = 'gaussian'
    SPHERICAL = 'spherical'
    PURE_NUGGET = 'pure-nugget'


@dataclass(frozen=True)
class VariogramFunctionModel:
    family: VariogramFamily
    nugget: float
    sill: float
    range_: float

    def __post_init__(self):
        object.__setattr__(self, 'family', VariogramFamily(self.family))
        if not (np.isfinite(self.nugget) and self.nugget >= 0):
            raise InvalidInput(f"nugget must be >= 0, got {self.nugget}")
        if not (np.isfinite(self.sill) and self.sill >= self.nugget):
            raise InvalidInput(f"sill must be >= nugget, got sill={self.sill}, nugget={self.nugget}")
        if not (np.isfinite(self.range_) and self.range_ > 0):
            raise InvalidInput(f"range must be > 0, got {self.range_}")
        if self.family is VariogramFamily.PURE_NUGGET and abs(self.sill - self.nugget) > config.DIAG_TOL:
            raise InvalidInput("pure-nugget model requires nugget == sill")

    def __call__(self, d):
        return eval_variogram_fn(self, d)

    def to_dict(self) -> dict:
        return {'family': self.family.value, 'nugget': self.nugget,
                'sill': self.sill, 'range': self.range_}


@dataclass(frozen=True, eq=False)
class LocationSet:
    """Coordinates (one row per location) under the Euclidean metric."""

    points: np.ndarray

    def __post_init__(self):
        arr = np.array(self.points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise InvalidInput(f"locations must be an (m, dim) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("locations contain non-finite coordinates")
        object.__setattr__(self, 'points', la.frozen(arr))

    @property
    def count(self) -> int:
        return self.points.shape[0]


class LocationVariogram(NamedTuple):
    gamma: VariogramMatrix
    report: ValidityReport


@dataclass
class KrigePrediction:
    prediction: float
    variance: float
    weights: np.ndarray
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'prediction': self.prediction,
            'variance': self.variance,
            'weights': self.weights.tolist(),
        }


def eval_variogram_fn(m: VariogramFunctionModel, d):
    """γ(d) for scalar or array d >= 0."""
    dist = np.asarray(d, dtype=float)
    if np.any(dist < 0) or not np.all(np.isfinite(dist)):
        raise InvalidInput("distances must be finite and nonnegative")
    partial = m.sill - m.nugget
    h = dist / m.range_

    if m.family is VariogramFamily.EXPONENTIAL:
        shape = 1.0 - np.exp(-3.0 * h)
    elif m.family is VariogramFamily.GAUSSIAN:
        shape = 1.0 - np.exp(-3.0 * h ** 2)
    elif m.family is VariogramFamily.SPHERICAL:
        shape = np.where(h < 1.0, 1.5 * h - 0.5 * h ** 3, 1.0)
    else:
        shape = np.ones_like(h)

    value = np.where(dist > 0, m.nugget + partial * shape, 0.0)
    return float(value) if value.ndim == 0 else value


def distance_matrix(locs: LocationSet) -> np.ndarray:
    if not isinstance(locs, LocationSet):
        locs = LocationSet(locs)
    if locs.count < 2:
        return np.zeros((locs.count, locs.count))
    return squareform(pdist(locs.points, metric='euclidean'))


def gamma_from_locations(m: VariogramFunctionModel, locs) -> LocationVariogram:
    """
    Γᵢⱼ = γ(d(xᵢ, xⱼ)), validated against σ² = sill. Raises InvalidVariogram
    when the matrix is not conditionally negative definite.
    """
    if not isinstance(locs, LocationSet):
        locs = LocationSet(locs)
    if locs.count < 2:
        raise InvalidInput(f"need at least 2 locations, got {locs.count}")
    dist = distance_matrix(locs)
    g = eval_variogram_fn(m, dist)
    np.fill_diagonal(g, 0.0)

    report = validate_variogram(g, sigma2=m.sill if m.sill > 0 else None)
    off = ~np.eye(locs.count, dtype=bool)
    dup_i, dup_j = np.nonzero(np.triu((dist == 0) & off))
    if dup_i.size:
        pairs = ", ".join(f"({i}, {j})" for i, j in zip(dup_i, dup_j))
        report.warnings.append(f"DuplicateLocations: zero distance for pairs {pairs}")
        log.warning(report.warnings[-1])

    if not report.conditionally_negative_definite:
        raise InvalidVariogram(report)
    return LocationVariogram(gamma=VariogramMatrix(g), report=report)


def augmented_covariance(m: VariogramFunctionModel, locs, target,
                         sigma2: Optional[float] = None) -> CovarianceMatrix:
    """Covariance σ²11' - Γ over {target} ∪ locs, the target in position 0."""
    if not isinstance(locs, LocationSet):
        locs = LocationSet(locs)
    target = np.atleast_2d(np.asarray(target, dtype=float))
    full = LocationSet(np.vstack([target, locs.points]))
    g = gamma_from_locations(m, full).gamma
    s2 = m.sill if sigma2 is None else sigma2
    return CovarianceMatrix(s2 - g.entries)


def krige_predict(sigma_full, y_obs, mu: float) -> KrigePrediction:
    """
    Plug-in predictor μ + Σ₀ᵢΣᵢᵢ⁻¹(y - μ1) and variance σ₀² - Σ₀ᵢΣᵢᵢ⁻¹Σᵢ₀,
    with the untried index in position 0 of sigma_full.
    """
    if not isinstance(sigma_full, CovarianceMatrix):
        sigma_full = CovarianceMatrix(sigma_full)
    s = sigma_full.entries
    y = np.asarray(y_obs, dtype=float).ravel()
    if y.shape[0] != s.shape[0] - 1:
        raise InvalidInput(f"{y.shape[0]} observations for a {s.shape[0]}x{s.shape[0]} covariance")
    if not np.all(np.isfinite(y)):
        raise InvalidInput("observations contain non-finite values")

    s_ii = s[1:, 1:]
    s_0i = s[0, 1:]
    weights = la.solve(s_ii, s_0i, "observed covariance")
    prediction = float(mu + weights @ (y - mu))
    variance = float(s[0, 0] - s_0i @ weights)

    result = KrigePrediction(prediction=prediction, variance=variance, weights=weights)
    if variance < 0:
        if variance < -VARIANCE_CLAMP_TOL:
            result.warnings.append(f"VarianceClamped: prediction variance {variance:.3g} set to 0")
            log.warning(result.warnings[-1])
        result.variance = 0.0
    return result

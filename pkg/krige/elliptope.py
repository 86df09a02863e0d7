#!/usr/bin/env python3
"""
Elliptope - Geometry of Correlation Matrices
============================================
Membership tests for the set of correlation matrices, the n=3 cubic
boundary 1 - x² - y² - z² + 2xyz = 0 with its horizontal sections, the
Cholesky-type parameterization by unit-norm upper-triangular rows, and
three prior samplers: uniform by rejection from the cube, Gram matrices
of normalized Gaussian columns, and independent unit factor rows.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import integrate, linalg

from config import config
from krige import _linalg as la
from krige._random import make_rng
from krige.errors import DegenerateDraw, InvalidInput, SingularInput
from krige.log import get_logger
from krige.model_core import CorrelationMatrix

log = get_logger(__name__)

MAX_REDRAWS = 100
TINY_NORM = 1e-300


# ==================== n = 3 ====================

@dataclass(frozen=True)
class Elliptope3Point:
    """Off-diagonal correlations of R = [[1, x, y], [x, 1, z], [y, z, 1]]."""

    x: float
    y: float
    z: float

    def cubic(self) -> float:
        x, y, z = self.x, self.y, self.z
        return 1.0 - x * x - y * y - z * z + 2.0 * x * y * z

    def matrix(self) -> np.ndarray:
        return np.array([[1.0, self.x, self.y],
                         [self.x, 1.0, self.z],
                         [self.y, self.z, 1.0]])


def elliptope3_contains(p) -> bool:
    """Cube constraints plus the nonnegative determinant cubic."""
    if not isinstance(p, Elliptope3Point):
        p = Elliptope3Point(*p)
    tol = config.BOUNDARY_TOL
    in_box = all(abs(v) <= 1.0 + tol for v in (p.x, p.y, p.z))
    return bool(in_box and p.cubic() >= -tol)


@dataclass
class EllipseSection:
    """The section z = c: x² + y² - 2cxy <= 1 - c²."""

    c: float
    coefficients: dict
    boundary: np.ndarray
    area: float

    def to_dict(self) -> dict:
        return {
            'c': self.c,
            'coefficients': self.coefficients,
            'area': self.area,
            'points': int(self.boundary.shape[0]),
        }


def section_area(c: float) -> float:
    """π√(1 - c²): the semi-axes along (1,1) and (1,-1) are √(1+c) and √(1-c)."""
    return math.pi * math.sqrt(max(0.0, 1.0 - c * c))


def elliptope3_section(c: float, points: Optional[int] = None) -> EllipseSection:
    if not -1.0 <= c <= 1.0:
        raise InvalidInput(f"section level c must lie in [-1, 1], got {c}")
    k = config.SECTION_POINTS if points is None else int(points)
    if k < 3:
        raise InvalidInput(f"section needs at least 3 boundary points, got {k}")
    theta = np.linspace(0.0, 2.0 * math.pi, k, endpoint=False)
    a = math.sqrt(1.0 + c)
    b = math.sqrt(1.0 - c)
    u = a * np.cos(theta)
    v = b * np.sin(theta)
    boundary = np.column_stack(((u + v) / math.sqrt(2.0), (u - v) / math.sqrt(2.0)))
    return EllipseSection(
        c=float(c),
        coefficients={'xx': 1.0, 'yy': 1.0, 'xy': -2.0 * c, 'rhs': 1.0 - c * c},
        boundary=boundary,
        area=section_area(c),
    )


def polygon_area(points: np.ndarray) -> float:
    """Shoelace area of a closed polyline given as (K, 2) vertices."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def elliptope3_volume() -> float:
    """Integral of the section areas over c in [-1, 1] (π²/2)."""
    value, _ = integrate.quad(section_area, -1.0, 1.0, epsabs=1e-12)
    return value


# ==================== GENERAL n ====================

def elliptope_contains(r) -> bool:
    """PSD test for a symmetric unit-diagonal matrix of any size."""
    arr = la.as_square(r, "matrix")
    if np.max(np.abs(np.diag(arr) - 1.0)) > config.DIAG_TOL:
        raise InvalidInput("elliptope membership requires a unit diagonal")
    if la.asymmetry(arr) > config.SYM_TOL:
        raise InvalidInput("elliptope membership requires a symmetric matrix")
    eig = linalg.eigvalsh(la.symmetrize(arr))
    return bool(eig[0] >= -la.scaled_tol(eig))


@dataclass(frozen=True, eq=False)
class CholeskyParam:
    """
    Strictly upper-triangular coefficients t (n×n, zero on and below the
    diagonal). Row i of the factor is (0, …, 0, √(1 - Σⱼ tᵢⱼ²), tᵢ,ᵢ₊₁, …).
    """

    t: np.ndarray

    def __post_init__(self):
        arr = la.as_square(self.t, "Cholesky coefficients")
        if arr.shape[0] < 2:
            raise InvalidInput("Cholesky parameterization needs n >= 2")
        if np.any(np.tril(arr) != 0.0):
            raise InvalidInput("Cholesky coefficients must be strictly upper triangular")
        if np.max(np.sum(arr ** 2, axis=1)) > 1.0 + config.DIAG_TOL:
            raise InvalidInput("each row of Cholesky coefficients must have squared sum <= 1")
        object.__setattr__(self, 't', la.frozen(arr))

    @classmethod
    def from_coefficients(cls, n: int, coefficients) -> "CholeskyParam":
        """Row-major upper coefficients, e.g. (t12, t13, t23) for n = 3."""
        coeffs = np.asarray(coefficients, dtype=float).ravel()
        iu = np.triu_indices(n, 1)
        if coeffs.shape[0] != iu[0].shape[0]:
            raise InvalidInput(f"n={n} needs {iu[0].shape[0]} coefficients, got {coeffs.shape[0]}")
        t = np.zeros((n, n))
        t[iu] = coeffs
        return cls(t)

    @property
    def n(self) -> int:
        return self.t.shape[0]

    @property
    def coefficients(self) -> np.ndarray:
        return self.t[np.triu_indices(self.n, 1)]

    @property
    def diagonal(self) -> np.ndarray:
        return np.sqrt(np.clip(1.0 - np.sum(self.t ** 2, axis=1), 0.0, None))

    @property
    def factor(self) -> np.ndarray:
        return self.t + np.diag(self.diagonal)

    @property
    def identifiable(self) -> bool:
        return bool(np.all(self.diagonal > 0.0))


def cholesky_to_corr(p: CholeskyParam) -> CorrelationMatrix:
    """R = T T', the Gram matrix of the unit-norm factor rows."""
    f = p.factor
    return CorrelationMatrix(la.symmetrize(f @ f.T))


def corr_to_cholesky(r) -> CholeskyParam:
    """Unique factor with positive diagonal for a nonsingular R."""
    if not isinstance(r, CorrelationMatrix):
        r = CorrelationMatrix(r)
    det = float(linalg.det(r.entries))
    if not det > 1e-12:
        raise SingularInput(det, "correlation matrix")
    flip = r.entries[::-1, ::-1]
    lower = linalg.cholesky(flip, lower=True)
    upper = lower[::-1, ::-1]
    t = np.triu(upper, 1)
    return CholeskyParam(t)


# ==================== PRIOR SAMPLERS ====================

@dataclass
class PriorDraws:
    """Stack of sampled correlation matrices with sampler statistics."""

    method: str
    n: int
    draws: np.ndarray
    proposals: int
    timed_out: bool = False
    warnings: List[str] = field(default_factory=list)

    @property
    def count(self) -> int:
        return self.draws.shape[0]

    @property
    def acceptance_rate(self) -> float:
        return self.count / self.proposals if self.proposals else 0.0

    def matrices(self) -> List[CorrelationMatrix]:
        return [CorrelationMatrix(d) for d in self.draws]

    def summary(self) -> dict:
        return {
            'method': self.method,
            'n': self.n,
            'count': self.count,
            'proposals': self.proposals,
            'acceptance_rate': self.acceptance_rate,
            'timed_out': self.timed_out,
        }


def _check_request(n: int, count: int):
    if int(n) != n or n < 2:
        raise InvalidInput(f"dimension must be an integer >= 2, got {n}")
    if int(count) != count or count < 0:
        raise InvalidInput(f"count must be a nonnegative integer, got {count}")


def _finish(stack: np.ndarray) -> np.ndarray:
    stack = 0.5 * (stack + stack.transpose(0, 2, 1))
    idx = np.arange(stack.shape[1])
    stack[:, idx, idx] = 1.0
    return np.clip(stack, -1.0, 1.0)


def sample_rejection(n: int, count: int, rng_seed: int, max_draws: Optional[int] = None) -> PriorDraws:
    """
    Uniform prior on the elliptope: off-diagonals i.i.d. U[-1, 1], kept when
    PSD. Stops at `max_draws` proposals with `timed_out` set and the draws
    accepted so far.
    """
    _check_request(n, count)
    budget = config.REJECTION_MAX_DRAWS if max_draws is None else int(max_draws)
    rng = make_rng(rng_seed)
    iu = np.triu_indices(n, 1)
    accepted = []
    total = 0
    proposals = 0

    while total < count and proposals < budget:
        batch = min(config.REJECTION_BATCH, budget - proposals)
        off = rng.uniform(-1.0, 1.0, size=(batch, iu[0].shape[0]))
        mats = np.broadcast_to(np.eye(n), (batch, n, n)).copy()
        mats[:, iu[0], iu[1]] = off
        mats[:, iu[1], iu[0]] = off
        eig = np.linalg.eigvalsh(mats)
        tol = config.PSD_REL_TOL * np.maximum(1.0, np.max(np.abs(eig), axis=1))
        keep = np.flatnonzero(eig[:, 0] >= -tol)

        need = count - total
        if keep.shape[0] >= need:
            keep = keep[:need]
            proposals += int(keep[-1]) + 1 if need else 0
        else:
            proposals += batch
        accepted.append(mats[keep])
        total += keep.shape[0]

    draws = _finish(np.concatenate(accepted)) if accepted else np.empty((0, n, n))
    result = PriorDraws('rejection', n, draws, proposals, timed_out=total < count)
    if result.timed_out:
        result.warnings.append(
            f"RejectionBudget: {total}/{count} accepted after {proposals:,} proposals"
        )
        log.warning(result.warnings[-1])
    log.info(f"Rejection n={n}: accepted {total} of {proposals:,} ({result.acceptance_rate:.4f})")
    return result


def _unit_blocks(rng: np.random.Generator, shape: tuple) -> np.ndarray:
    """Standard normal vectors along the last axis scaled to unit length."""
    v = rng.standard_normal(shape)
    norms = np.linalg.norm(v, axis=-1)
    for _ in range(MAX_REDRAWS):
        bad = norms < TINY_NORM
        if not np.any(bad):
            return v / norms[..., None]
        v[bad] = rng.standard_normal((int(bad.sum()), shape[-1]))
        norms = np.linalg.norm(v, axis=-1)
    raise DegenerateDraw(f"column norm underflow persisted after {MAX_REDRAWS} redraws")


def sample_gram(n: int, count: int, rng_seed: int) -> PriorDraws:
    """R = A'A with the columns of A independent uniform unit vectors."""
    _check_request(n, count)
    rng = make_rng(rng_seed)
    # rows of `cols` are the columns of A
    cols = _unit_blocks(rng, (count, n, n))
    draws = _finish(cols @ cols.transpose(0, 2, 1))
    return PriorDraws('gram', n, draws, count)


def sample_cholesky(n: int, count: int, rng_seed: int) -> PriorDraws:
    """R = T T' with factor row i drawn uniformly on the upper half unit sphere of its free block."""
    _check_request(n, count)
    rng = make_rng(rng_seed)
    factor = np.zeros((count, n, n))
    for i in range(n):
        row = _unit_blocks(rng, (count, n - i))
        row[:, 0] = np.abs(row[:, 0])
        factor[:, i, i:] = row
    draws = _finish(factor @ factor.transpose(0, 2, 1))
    return PriorDraws('cholesky', n, draws, count)


SAMPLERS = {
    'rejection': sample_rejection,
    'gram': sample_gram,
    'cholesky': sample_cholesky,
}

#!/usr/bin/env python3
"""
Linear Algebra Helpers - Tolerances and Conditioning
====================================================
Shared checks for dense symmetric matrices: squareness and finiteness,
read-only copies, the scaled eigenvalue tolerance used by every PSD and
conditional-negative-definiteness test, and the rcond guard that turns
numerically singular systems into SingularInput (or a caller-chosen error).
"""

import numpy as np
from scipy import linalg

from config import config
from krige.errors import InvalidInput, SingularInput


def as_square(a, name: str = "matrix") -> np.ndarray:
    """Float copy of `a`, rejected unless square and finite."""
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} has non-finite entries")
    return arr


def frozen(arr: np.ndarray) -> np.ndarray:
    """Read-only float copy."""
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def scaled_tol(eigenvalues: np.ndarray, rel: float = None) -> float:
    """Eigenvalue slack: rel × (largest |eigenvalue|, floored at 1)."""
    rel = config.PSD_REL_TOL if rel is None else rel
    scale = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    return rel * max(1.0, scale)


def asymmetry(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.T))) if a.size else 0.0


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def centering_matrix(n: int) -> np.ndarray:
    """I - (1/n)11'."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def rcond(a: np.ndarray) -> float:
    """Reciprocal 2-norm condition number from the singular values."""
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def guard(a: np.ndarray, what: str = "matrix", exc=None) -> float:
    """Raise when `a` fails the conditioning guard; return its rcond otherwise."""
    rc = rcond(a)
    if not rc > config.RCOND_MIN:
        if exc is not None:
            raise exc(rc)
        raise SingularInput(rc, what)
    return rc


def inverse(a: np.ndarray, what: str = "matrix", exc=None) -> np.ndarray:
    """Guarded dense inverse."""
    guard(a, what, exc)
    return linalg.inv(a)


def solve(a: np.ndarray, b: np.ndarray, what: str = "matrix", exc=None) -> np.ndarray:
    """Guarded symmetric solve a x = b."""
    guard(a, what, exc)
    return linalg.solve(a, b, assume_a='sym')

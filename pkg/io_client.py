#!/usr/bin/env python3
"""
File Client - Matrix, Sample and Model Persistence
==================================================
Handles all file interactions for the krige toolkit: headerless numeric CSV
for matrices, samples and locations, and JSON model files with keys
`mu`, `sigma2`, `gamma` (row-major array of arrays) and `metadata`.
A path of `-` means stdin (reads) or stdout (writes).
"""

import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Union

import numpy as np
import pandas as pd

from config import config
from krige.errors import InputFormatError
from krige.model_core import KrigeModel, VariogramMatrix

PathLike = Union[str, Path]


@dataclass
class ModelFile:
    """Serialized (μ, σ², Γ) with free-form string metadata."""

    mu: float
    sigma2: float
    gamma: np.ndarray
    metadata: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_model(cls, model: KrigeModel, metadata: Dict[str, str] = None) -> "ModelFile":
        """Snapshot a model together with provenance metadata."""
        return cls(model.mu, model.sigma2, np.array(model.gamma.entries), dict(metadata or {}))

    def to_model(self) -> KrigeModel:
        """Rebuild the model; raises on an invalid Γ or a σ² below min_sigma2."""
        return KrigeModel(mu=self.mu, sigma2=self.sigma2, gamma=VariogramMatrix(self.gamma))

    def to_dict(self) -> dict:
        return {
            'mu': float(self.mu),
            'sigma2': float(self.sigma2),
            'gamma': np.asarray(self.gamma, dtype=float).tolist(),
            'metadata': {str(k): str(v) for k, v in self.metadata.items()},
        }


def _is_stdio(path: PathLike) -> bool:
    return str(path) == '-'


# ==================== CSV ====================

def read_table(path: PathLike) -> np.ndarray:
    """Headerless numeric CSV -> 2-D float array."""
    try:
        src = io.StringIO(sys.stdin.read()) if _is_stdio(path) else path
        frame = pd.read_csv(src, header=None, dtype=float, skipinitialspace=True)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, ValueError) as e:
        raise InputFormatError(f"cannot parse numeric CSV '{path}': {e}")
    arr = frame.to_numpy(dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InputFormatError(f"'{path}' has missing or non-finite values")
    return arr


def read_matrix(path: PathLike) -> np.ndarray:
    """Headerless numeric CSV that must be square (a Γ, Σ or R)."""
    arr = read_table(path)
    if arr.shape[0] != arr.shape[1]:
        raise InputFormatError(f"'{path}' is not square: shape {arr.shape}")
    return arr


def write_table(arr, path: PathLike, precision: int = None) -> None:
    """
    Write a 1-D or 2-D array as headerless CSV.

    Floats use `%.{precision}g`; the default 17 significant digits round-trips
    every double exactly.
    """
    precision = config.CSV_PRECISION if precision is None else precision
    frame = pd.DataFrame(np.atleast_2d(np.asarray(arr, dtype=float)))
    text = frame.to_csv(header=False, index=False, float_format=f'%.{precision}g')
    if _is_stdio(path):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


# ==================== MODEL FILES ====================

def read_model_file(path: PathLike) -> ModelFile:
    """Parse a JSON model file; malformed or non-square content raises InputFormatError."""
    try:
        text = sys.stdin.read() if _is_stdio(path) else Path(path).read_text()
        payload = json.loads(text)
        gamma = np.asarray(payload['gamma'], dtype=float)
        model_file = ModelFile(
            mu=float(payload['mu']),
            sigma2=float(payload['sigma2']),
            gamma=gamma,
            metadata={str(k): str(v) for k, v in (payload.get('metadata') or {}).items()},
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as e:
        raise InputFormatError(f"cannot parse model file '{path}': {e}")
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1]:
        raise InputFormatError(f"model file '{path}' has a non-square gamma")
    return model_file


def read_model(path: PathLike) -> KrigeModel:
    """Model file -> validated KrigeModel (σ² is checked against min_sigma2)."""
    return read_model_file(path).to_model()


def write_model(model_file: ModelFile, path: PathLike) -> None:
    """Write a model file as indented JSON."""
    text = json.dumps(model_file.to_dict(), indent=2) + "\n"
    if _is_stdio(path):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


def write_report(report: dict, stream=None) -> None:
    """Machine-readable JSON report, on stdout unless another stream is given."""
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps(report, indent=2, default=_jsonable) + "\n")
    stream.flush()


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")

"""
Krige Package
=============
Variogram-matrix parameterization of stationary Gaussian models:
model core, Sherman-Morrison inverse machinery, the span(1)⊥ projection,
elliptope geometry and priors, and Kriging prediction.
"""

from krige.errors import KrigeError
from krige.model_core import (
    CorrelationMatrix,
    CovarianceMatrix,
    KrigeModel,
    ValidityReport,
    VariogramMatrix,
    validate_variogram,
)

__all__ = [
    'KrigeError',
    'CorrelationMatrix',
    'CovarianceMatrix',
    'KrigeModel',
    'ValidityReport',
    'VariogramMatrix',
    'validate_variogram',
]

"""
Error Types
===========
Exceptions raised by the krige modules. The CLI maps `InputFormatError`
to exit code 2 and every other `KrigeError` to exit code 1.
"""


class KrigeError(Exception):
    """Base class for domain failures."""


class InvalidInput(KrigeError, ValueError):
    """Argument violates the invariants of its type."""


class SigmaTooSmall(KrigeError):
    """The common variance is below the admissible lower bound for Γ."""

    def __init__(self, min_required: float, sigma2: float):
        self.min_required = float(min_required)
        self.sigma2 = float(sigma2)
        super().__init__(
            f"sigma2={self.sigma2:.17g} is below min_sigma2={self.min_required:.17g}"
        )


class NotConditionallyNegDef(KrigeError):
    def __init__(self, eigenvalue: float, tol: float):
        self.eigenvalue = float(eigenvalue)
        self.tol = float(tol)
        super().__init__(
            f"PΓP has eigenvalue {self.eigenvalue:.6g} > tolerance {self.tol:.3g}"
        )


class Unbounded(KrigeError):
    """x'Γx has no finite supremum on the hyperplane x'1 = 1."""


class SingularInput(KrigeError):
    def __init__(self, rcond: float, what: str = "matrix"):
        self.rcond = float(rcond)
        super().__init__(f"{what} is singular to working precision (rcond={self.rcond:.3g})")


class NotInvertible(KrigeError):
    """11' - A is singular: the Sherman-Morrison scalar vanishes."""

    def __init__(self, scalar: float):
        self.scalar = float(scalar)
        super().__init__(f"rank-one correction scalar {self.scalar:.3g} is zero")


class SingularModel(KrigeError):
    def __init__(self, rcond: float):
        self.rcond = float(rcond)
        super().__init__(f"model covariance is singular (rcond={self.rcond:.3g})")


class InvalidVariogram(KrigeError):
    """A constructed matrix failed validation; the report is attached."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"variogram matrix is invalid: {', '.join(report.failures())}")


class DegenerateDraw(KrigeError):
    """A random draw produced an unusable (zero-norm) column."""


class InputFormatError(KrigeError):
    """File content could not be parsed into the expected shape."""

"""
Typed errors raised by the sigma-stab library.

Every error derives from SigmaStabError so callers (the CLI, analyze) can
catch the whole family in one place. Row/column indices are 1-based.
"""

from typing import Optional, Tuple


class SigmaStabError(Exception):
    """Base class for all sigma-stab errors"""
    pass


class MatrixError(SigmaStabError, ValueError):
    """Invalid matrix input (shape, non-finite entries, bad diagonal)"""
    pass


class MatrixParseError(MatrixError):
    """A matrix file could not be parsed"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[int] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column {column}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ZeroDiagonal(MatrixError):
    """A diagonal entry is zero, so D is not invertible"""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"diagonal entry {index} is zero; D is not invertible")


class NonNegativeDiagonal(MatrixError):
    """A diagonal entry is >= 0, so no diagonal-dominance guarantee exists"""

    def __init__(self, index: int):
        self.index = index
        super().__init__(
            f"diagonal entry {index} is not negative; no diagonal-dominance bound available"
        )


class InvalidSigma(MatrixError):
    """sigma is not a finite real number"""
    pass


class ZeroPolynomial(SigmaStabError, ValueError):
    """Operation undefined for the zero polynomial"""

    def __init__(self, message: str = "operation undefined for the zero polynomial"):
        super().__init__(message)


class NoConvergence(SigmaStabError, ArithmeticError):
    """An iterative method exhausted its budget"""

    def __init__(self, message: str, interval: Optional[Tuple[float, float]] = None,
                 max_iters: Optional[int] = None):
        self.interval = interval
        self.max_iters = max_iters
        super().__init__(message)


class NoBracket(SigmaStabError):
    """No sign change of the spectral abscissa on the search interval"""
    pass


class NotSigmaStable(SigmaStabError):
    """A sigma above the crossing still has a nonnegative spectral abscissa"""

    def __init__(self, sigma_bad: float, abscissa: float):
        self.sigma_bad = sigma_bad
        self.abscissa = abscissa
        super().__init__(
            f"spectral abscissa {abscissa:.3e} >= 0 at sigma={sigma_bad!r} above the crossing"
        )


class DimensionTooLarge(SigmaStabError, ValueError):
    """Exact expansion requested for a matrix that is too large"""

    def __init__(self, n: int, limit: int):
        self.n = n
        self.limit = limit
        super().__init__(f"exact Leibniz expansion limited to n <= {limit}, got n={n}")


class NoCrossingInRange(SigmaStabError):
    """Grid scan found no sign change of the abscissa"""
    pass


class InvalidEnsembleParameters(SigmaStabError, ValueError):
    """Random-matrix generator called with invalid ranges"""
    pass


class ReportValidationError(SigmaStabError, ValueError):
    """A report document failed schema validation"""
    pass


class ConfigError(SigmaStabError, ValueError):
    """Invalid analysis options"""
    pass

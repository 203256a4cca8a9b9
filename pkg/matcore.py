"""
Matrix representation and the matrices derived from it.

A Matrix is a dense, row-major, immutable real square matrix. This module
builds the sigma-scaled matrix M_sigma (diagonal multiplied by sigma), the
rescaled matrix Mbar0 = I - D^-1 M, and the row-Gershgorin threshold above
which M_sigma is diagonally dominant. It also reads and writes the CSV and
JSON matrix file formats shared with the CLI.
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import Any, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, PrivateAttr, ValidationError, model_validator

from errors import InvalidSigma, MatrixError, MatrixParseError, NonNegativeDiagonal, ZeroDiagonal

logger = logging.getLogger(__name__)


class Matrix(BaseModel):
    """Dense real n x n matrix, stored row-major; the JSON file format is this model"""
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1, description="Dimension")
    entries: Tuple[Tuple[FiniteFloat, ...], ...] = Field(..., description="Row-major entries m_ij")

    _array: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_square(self) -> "Matrix":
        """Reject ragged or non-square entry tables"""
        if len(self.entries) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.entries)}")
        for i, row in enumerate(self.entries, start=1):
            if len(row) != self.n:
                raise ValueError(f"row {i} has {len(row)} entries, expected {self.n}")
        return self

    def model_post_init(self, __context: Any) -> None:
        array = np.array(self.entries, dtype=float).reshape(self.n, self.n)
        array.setflags(write=False)
        self._array = array

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Matrix":
        """
        Build a matrix from a sequence of rows.

        Raises:
            MatrixError: If the rows are ragged, non-square or contain NaN/Inf
        """
        try:
            entries = tuple(tuple(float(v) for v in row) for row in rows)
            return cls(n=len(entries), entries=entries)
        except ValidationError as e:
            raise MatrixError(f"Invalid matrix: {_first_error(e)}") from e
        except (TypeError, ValueError) as e:
            raise MatrixError(f"Invalid matrix: {e}") from e

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Matrix":
        array = np.asarray(array, dtype=float)
        if array.ndim != 2:
            raise MatrixError(f"Invalid matrix: expected a 2-D array, got shape {array.shape}")
        return cls.from_rows(array.tolist())

    @property
    def array(self) -> np.ndarray:
        """Read-only numpy view of the entries"""
        return self._array

    @property
    def diagonal(self) -> Tuple[float, ...]:
        return tuple(self.entries[i][i] for i in range(self.n))


MatrixLike = Union[Matrix, np.ndarray]


def as_array(a: MatrixLike) -> np.ndarray:
    """Return the float array behind a Matrix or a square ndarray"""
    if isinstance(a, Matrix):
        return a.array
    array = np.asarray(a, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise MatrixError(f"Invalid matrix: expected a non-empty square array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise MatrixError("Invalid matrix: entries must be finite")
    return array


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    loc = ".".join(str(part) for part in err.get("loc", ()))
    return f"{loc}: {err.get('msg')}" if loc else str(err.get("msg"))


def _check_sigma(sigma: float) -> float:
    try:
        value = float(sigma)
    except (TypeError, ValueError) as e:
        raise InvalidSigma(f"sigma must be a real number, got {sigma!r}") from e
    if not math.isfinite(value):
        raise InvalidSigma(f"sigma must be finite, got {sigma!r}")
    return value


def sigma_array(m: MatrixLike, sigma: float) -> np.ndarray:
    """M_sigma as a fresh ndarray (diagonal multiplied by sigma, off-diagonal untouched)"""
    sigma = _check_sigma(sigma)
    a = np.array(as_array(m), dtype=float, copy=True)
    np.fill_diagonal(a, sigma * np.diag(a))
    return a


def build_sigma_matrix(m: Matrix, sigma: float) -> Matrix:
    """
    Build M_sigma = M - (1 - sigma) * D.

    Args:
        m: Input matrix
        sigma: Diagonal scaling parameter (finite real)

    Returns:
        M with every diagonal entry m_ii replaced by sigma * m_ii

    Raises:
        InvalidSigma: If sigma is not finite
    """
    return Matrix.from_array(sigma_array(m, sigma))


def build_mbar0(m: Matrix) -> Matrix:
    """
    Build Mbar0 = I - D^-1 M, entry (i, j) = delta_ij - m_ij / m_ii.

    Raises:
        ZeroDiagonal: If some m_ii is zero (1-based index)
    """
    d = np.diag(m.array)
    for i, value in enumerate(d, start=1):
        if value == 0.0:
            raise ZeroDiagonal(i)
    # m_ii / m_ii is exactly 1.0, so the diagonal comes out exactly 0.0
    mbar0 = np.eye(m.n) - m.array / d[:, None]
    return Matrix.from_array(mbar0)


def gershgorin_sigma(m: Matrix) -> float:
    """
    Row-disc Gershgorin threshold sigma_G.

    For any sigma > sigma_G every row disc of M_sigma lies in the open left
    half-plane, so the spectral abscissa is negative.

    Returns:
        max_i (sum_{j != i} |m_ij|) / (-m_ii)

    Raises:
        NonNegativeDiagonal: If some m_ii >= 0 (1-based index)
    """
    a = m.array
    d = np.diag(a)
    for i, value in enumerate(d, start=1):
        if value >= 0.0:
            raise NonNegativeDiagonal(i)
    off_sums = np.sum(np.abs(a), axis=1) - np.abs(d)
    return float(np.max(off_sums / -d))


def lu_determinant(a: MatrixLike) -> float:
    """Determinant by LU factorization (LAPACK getrf through numpy)"""
    return float(np.linalg.det(as_array(a)))


def inf_norm(a: MatrixLike) -> float:
    """Maximum absolute row sum"""
    return float(np.max(np.sum(np.abs(as_array(a)), axis=1)))


def parse_matrix_csv(text: str) -> Matrix:
    """
    Parse n lines of n comma-separated decimals.

    Raises:
        MatrixParseError: On ragged rows, non-numeric or non-finite cells
    """
    rows: List[List[float]] = []
    width = None
    for i, cells in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        row = []
        for j, cell in enumerate(cells, start=1):
            try:
                value = float(cell.strip())
            except ValueError:
                raise MatrixParseError(f"not a number: {cell.strip()!r}", row=i, column=j)
            if not math.isfinite(value):
                raise MatrixParseError(f"non-finite value: {cell.strip()!r}", row=i, column=j)
            row.append(value)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixParseError(f"ragged row: {len(row)} values, expected {width}", row=i)
        rows.append(row)

    if not rows:
        raise MatrixParseError("empty matrix file")
    if len(rows) != width:
        raise MatrixParseError(f"matrix is not square: {len(rows)} rows of {width} values")
    return Matrix.from_rows(rows)


def parse_matrix_json(text: str) -> Matrix:
    """
    Parse the JSON matrix format {"n": int, "entries": [[...], ...]}.

    Raises:
        MatrixParseError: On malformed JSON, ragged rows or invalid values
    """
    try:
        return Matrix.model_validate_json(text)
    except ValidationError as e:
        err = e.errors()[0]
        loc = err.get("loc", ())
        row = column = None
        if len(loc) >= 2 and loc[0] == "entries" and isinstance(loc[1], int):
            row = loc[1] + 1
            if len(loc) >= 3 and isinstance(loc[2], int):
                column = loc[2] + 1
        raise MatrixParseError(f"invalid matrix JSON: {err.get('msg')}", row=row, column=column) from e


def load_matrix(path: Union[str, Path]) -> Matrix:
    """
    Read a matrix file, format chosen by extension (.csv or .json).

    Raises:
        FileNotFoundError: If the file does not exist
        MatrixParseError: On parse errors or an unknown extension
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()
    if suffix == ".csv":
        m = parse_matrix_csv(text)
    elif suffix == ".json":
        m = parse_matrix_json(text)
    else:
        raise MatrixParseError(f"unknown matrix file extension {suffix!r} (expected .csv or .json)")
    logger.debug("loaded %dx%d matrix from %s", m.n, m.n, path)
    return m


def dump_matrix_json(m: Matrix) -> str:
    """Serialize to the JSON matrix format; floats round-trip exactly"""
    return m.model_dump_json()

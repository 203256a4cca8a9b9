"""
Independent references and matrix generators for testing.

The random streams use numpy's Philox counter-based bit generator,
numpy.random.Generator(numpy.random.Philox(seed)). Draw order is fixed:
the diagonal (n values), then the sparsity mask (n*n), then the
off-diagonal values (n*n), so a seed always yields the same matrix.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple, Union

import numpy as np

from eig import spectral_abscissa
from errors import DimensionTooLarge, InvalidEnsembleParameters, NoCrossingInRange, SigmaStabError
from matcore import Matrix, gershgorin_sigma
from stability import CrossingClass, critical_sigma, omega_set
from sigmacharpoly import coefficient_polynomials

logger = logging.getLogger(__name__)

LEIBNIZ_LIMIT = 6

Key = Tuple[int, int]


@dataclass(frozen=True)
class BiPoly:
    """Exact polynomial in (x, sigma); coeffs maps (x-degree, sigma-degree) to a nonzero Fraction"""
    coeffs: Dict[Key, Fraction] = field(default_factory=dict)

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.coeffs.get((i, j), Fraction(0))

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        out: Dict[Key, Fraction] = {}
        for (i1, j1), c1 in self.coeffs.items():
            for (i2, j2), c2 in other.coeffs.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + c1 * c2
        return BiPoly({k: v for k, v in out.items() if v != 0})

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return BiPoly({k: v for k, v in out.items() if v != 0})

    def scaled(self, factor: int) -> "BiPoly":
        return BiPoly({k: v * factor for k, v in self.coeffs.items()})

    def as_float_dict(self) -> Dict[Key, float]:
        return {k: float(v) for k, v in self.coeffs.items()}


def _parity(perm: Tuple[int, ...]) -> int:
    inversions = sum(1 for a, b in itertools.combinations(range(len(perm)), 2) if perm[a] > perm[b])
    return -1 if inversions % 2 else 1


def leibniz_charpoly_sigma(m: Matrix) -> BiPoly:
    """
    det(x I - M_sigma) expanded exactly over all n! permutations.

    Entries are converted with Fraction(float), which is exact for any double.

    Raises:
        DimensionTooLarge: If n > 6
    """
    n = m.n
    if n > LEIBNIZ_LIMIT:
        raise DimensionTooLarge(n, LEIBNIZ_LIMIT)

    def entry(i: int, j: int) -> BiPoly:
        value = Fraction(m.entries[i][j])
        if i == j:
            # x - sigma * m_ii
            return BiPoly({k: v for k, v in {(1, 0): Fraction(1), (0, 1): -value}.items() if v != 0})
        return BiPoly({(0, 0): -value} if value != 0 else {})

    cells = [[entry(i, j) for j in range(n)] for i in range(n)]
    total = BiPoly()
    for perm in itertools.permutations(range(n)):
        term = BiPoly({(0, 0): Fraction(1)})
        for i, j in enumerate(perm):
            term = term * cells[i][j]
            if not term.coeffs:
                break
        if term.coeffs:
            total = total + term.scaled(_parity(perm))
    logger.debug("Leibniz expansion n=%d: %d nonzero terms", n, len(total.coeffs))
    return total


@dataclass(frozen=True)
class GridScan:
    sigma_star: float
    bracket: Tuple[float, float]
    sigmas: Tuple[float, ...]
    abscissae: Tuple[float, ...]

    @property
    def spacing(self) -> float:
        return self.sigmas[1] - self.sigmas[0]


def grid_scan_crossing(m: Matrix, sigma_lo: float, sigma_hi: float, steps: int) -> GridScan:
    """
    Sample the spectral abscissa on a uniform grid of `steps` points.

    The grid is read from sigma_hi downward; the first bracket with
    abscissa >= 0 below and < 0 above is the crossing nearest the stable
    end. Its estimate is the linear interpolation of the abscissa.

    Raises:
        ValueError: If steps < 2 or sigma_lo >= sigma_hi
        NoCrossingInRange: If no such sign change exists on the grid
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if not sigma_lo < sigma_hi:
        raise ValueError(f"need sigma_lo < sigma_hi, got [{sigma_lo}, {sigma_hi}]")

    sigmas = np.linspace(sigma_lo, sigma_hi, steps)
    values = [spectral_abscissa(m, float(s)) for s in sigmas]
    for k in range(steps - 2, -1, -1):
        f0, f1 = values[k], values[k + 1]
        if f0 >= 0.0 > f1:
            s0, s1 = float(sigmas[k]), float(sigmas[k + 1])
            estimate = s0 + f0 * (s1 - s0) / (f0 - f1)
            return GridScan(sigma_star=estimate, bracket=(s0, s1),
                            sigmas=tuple(float(s) for s in sigmas), abscissae=tuple(values))
    raise NoCrossingInRange(f"no sign change of the abscissa on [{sigma_lo}, {sigma_hi}] ({steps} points)")


def _check_range(name: str, bounds: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise InvalidEnsembleParameters(f"{name} must be a finite (low, high) pair, got {bounds}")
    return lo, hi


def random_matrix(n: int, seed: int, diag_range: Tuple[float, float] = (-5.0, -0.1),
                  offdiag_range: Tuple[float, float] = (-5.0, 5.0), sparsity: float = 0.0) -> Matrix:
    """
    Random matrix with a strictly negative diagonal.

    Args:
        n: Dimension (>= 1)
        seed: Philox seed
        diag_range: (low, high) for the diagonal, high < 0
        offdiag_range: (low, high) for off-diagonal entries
        sparsity: Probability that an off-diagonal entry is zero

    Raises:
        InvalidEnsembleParameters: On invalid n, ranges or sparsity
    """
    if n < 1:
        raise InvalidEnsembleParameters(f"n must be >= 1, got {n}")
    d_lo, d_hi = _check_range("diag_range", diag_range)
    o_lo, o_hi = _check_range("offdiag_range", offdiag_range)
    if d_hi >= 0.0:
        raise InvalidEnsembleParameters(f"diag_range must be strictly negative, got {diag_range}")
    if not 0.0 <= sparsity <= 1.0:
        raise InvalidEnsembleParameters(f"sparsity must lie in [0, 1], got {sparsity}")

    rng = np.random.Generator(np.random.Philox(seed))
    diag = rng.uniform(d_lo, d_hi, size=n)
    mask = rng.random((n, n)) < sparsity
    off = rng.uniform(o_lo, o_hi, size=(n, n))
    a = np.where(mask, 0.0, off)
    np.fill_diagonal(a, diag)
    return Matrix.from_array(a)


def random_integer_matrix(n: int, seed: int, low: int = -4, high: int = 4) -> Matrix:
    """Integer entries in [low, high], diagonal in [low, -1]"""
    if n < 1:
        raise InvalidEnsembleParameters(f"n must be >= 1, got {n}")
    if low > -1 or high < low:
        raise InvalidEnsembleParameters(f"need low <= -1 and low <= high, got [{low}, {high}]")
    rng = np.random.Generator(np.random.Philox(seed))
    diag = rng.integers(low, 0, size=n)
    a = rng.integers(low, high + 1, size=(n, n)).astype(float)
    np.fill_diagonal(a, diag)
    return Matrix.from_array(a)


@dataclass(frozen=True)
class SlackCase:
    seed: int
    matrix: Matrix
    sigma_star: float
    max_omega: float
    slack: float
    grid_sigma_star: float


def search_strict_slack(n: int, seeds: Iterable[int], min_slack: float = 1e-3,
                        steps: int = 400, **ensemble) -> Optional[SlackCase]:
    """
    Find a matrix with a complex-pair crossing and sigma* - max(Omega) > min_slack.

    The crossing must be confirmed by a grid scan within two grid spacings.
    Extra keyword arguments go to random_matrix.

    Returns:
        The first matching SlackCase, or None
    """
    for seed in seeds:
        m = random_matrix(n, seed, **ensemble)
        try:
            critical = critical_sigma(m)
            if critical.crossing != CrossingClass.COMPLEX_PAIR:
                continue
            omega = omega_set(coefficient_polynomials(m))
            if omega.max_omega is None:
                continue
            slack = critical.sigma_star - omega.max_omega
            if slack <= min_slack:
                continue
            scan = grid_scan_crossing(m, 0.0, gershgorin_sigma(m) + 1.0, steps)
        except SigmaStabError as e:
            logger.debug("seed %d skipped: %s", seed, e)
            continue
        if abs(scan.sigma_star - critical.sigma_star) > 2.0 * scan.spacing:
            logger.debug("seed %d: grid scan disagrees with bisection", seed)
            continue
        logger.info("strict slack %.4g found at seed %d", slack, seed)
        return SlackCase(seed=seed, matrix=m, sigma_star=critical.sigma_star,
                         max_omega=omega.max_omega, slack=slack, grid_sigma_star=scan.sigma_star)
    return None


class SlackFixture(Matrix):
    """
    A strict-slack matrix together with the search that produced it.

    The extra fields are ignored by load_matrix, so the file is also a plain
    matrix fixture for the command line.
    """
    seed: int
    min_slack: float
    sigma_star: float
    max_omega: float
    slack: float

    @classmethod
    def from_case(cls, case: SlackCase, min_slack: float) -> "SlackFixture":
        return cls(n=case.matrix.n, entries=case.matrix.entries, seed=case.seed,
                   min_slack=min_slack, sigma_star=case.sigma_star,
                   max_omega=case.max_omega, slack=case.slack)


def save_slack_fixture(case: SlackCase, path: Union[str, Path], min_slack: float = 1e-3) -> SlackFixture:
    """Write a SlackCase as a JSON matrix fixture with its seed and measured slack"""
    fixture = SlackFixture.from_case(case, min_slack)
    Path(path).write_text(fixture.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("persisted strict-slack seed %d to %s", case.seed, path)
    return fixture


def load_slack_fixture(path: Union[str, Path]) -> SlackFixture:
    return SlackFixture.model_validate_json(Path(path).read_text(encoding="utf-8"))

"""
Characteristic polynomial of M_sigma with coefficients that are polynomials in sigma.

det(x I - M_sigma) = sum_i p_i(sigma) x**i. Each p_i is recovered numerically:
the characteristic polynomial is evaluated by Faddeev-LeVerrier at the
integer nodes sigma = 0, 1, ..., n and every coefficient index is then
interpolated with Newton divided differences.

Node values are computed in numpy's longdouble (80-bit on x86 Linux, binary128
on aarch64 Linux, plain double elsewhere) together with a running bound on
their rounding error. For integer matrices the node values are exact integers,
so the recovered coefficients round to the exact integers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from matcore import Matrix, MatrixLike, as_array, sigma_array
from upoly import RealPoly, evaluate

logger = logging.getLogger(__name__)

# Integer nodes 0..n lose conditioning quickly beyond this size
CONDITIONING_LIMIT = 25
WORKING_DTYPE = np.longdouble
# Safety factor on the (n + 1)(n + 3) eps rounding bound of the recurrence
FL_ERROR_FACTOR = 4.0


@dataclass(frozen=True)
class SigmaCharPoly:
    """p[i] is the coefficient of x**i, a RealPoly in sigma; p[n] == 1"""
    n: int
    p: Tuple[RealPoly, ...]
    warnings: Tuple[str, ...] = ()

    def evaluate(self, sigma: float) -> Tuple[float, ...]:
        """Coefficients (ascending in x) of the characteristic polynomial at sigma"""
        return tuple(evaluate(pi, sigma) for pi in self.p)

    def coefficient(self, i: int, j: int) -> float:
        """Coefficient of x**i sigma**j"""
        coeffs = self.p[i].coeffs
        return coeffs[j] if j < len(coeffs) else 0.0

    def leading_coefficients(self) -> Tuple[float, ...]:
        """Coefficient of sigma**(n-i) in p[i], for i = 0..n-1"""
        return tuple(self.coefficient(i, self.n - i) for i in range(self.n))

    def structural_zero_residuals(self) -> Tuple[float, ...]:
        """Coefficient of sigma**(n-i-1) in p[i], for i = 0..n-1; zero in exact arithmetic"""
        return tuple(self.coefficient(i, self.n - i - 1) for i in range(self.n))

    def as_bivariate(self) -> Dict[Tuple[int, int], float]:
        """Nonzero coefficients keyed by (x-degree, sigma-degree)"""
        out = {}
        for i, pi in enumerate(self.p):
            for j, c in enumerate(pi.coeffs):
                if c != 0.0:
                    out[(i, j)] = c
        return out


def _faddeev_leverrier(a: np.ndarray) -> np.ndarray:
    """Ascending characteristic coefficients of a, computed in a's dtype"""
    n = a.shape[0]
    identity = np.eye(n, dtype=a.dtype)
    c = np.zeros(n + 1, dtype=a.dtype)
    c[n] = 1
    am = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = am + c[n - k + 1] * identity
        am = a @ mk
        c[n - k] = -np.trace(am) / k
    return c


def _faddeev_leverrier_magnitudes(a: np.ndarray) -> np.ndarray:
    """The same recurrence on |a| with every term added, bounding each intermediate"""
    n = a.shape[0]
    absolute = np.abs(a).astype(float)
    identity = np.eye(n)
    c = np.zeros(n + 1)
    c[n] = 1.0
    am = np.zeros((n, n))
    for k in range(1, n + 1):
        mk = am + c[n - k + 1] * identity
        am = absolute @ mk
        c[n - k] = np.trace(am) / k
    return c


def charpoly_at(m: MatrixLike, sigma: float) -> Tuple[float, ...]:
    """
    Characteristic polynomial det(x I - M_sigma) by the Faddeev-LeVerrier recurrence.

    Args:
        m: Input matrix
        sigma: Diagonal scaling

    Returns:
        n + 1 coefficients ascending in x; the last one is exactly 1.0
    """
    return tuple(float(c) for c in _faddeev_leverrier(sigma_array(m, sigma)))


@dataclass(frozen=True)
class NodeValue:
    """Characteristic coefficients at one integer node with an absolute error bound for each"""
    values: np.ndarray
    bounds: np.ndarray


def _node_value(m: Matrix, node: int) -> NodeValue:
    a = as_array(m).astype(WORKING_DTYPE)
    np.fill_diagonal(a, np.diagonal(a) * WORKING_DTYPE(node))
    n = a.shape[0]
    gamma = FL_ERROR_FACTOR * (n + 1) * (n + 3) * float(np.finfo(WORKING_DTYPE).eps)
    return NodeValue(values=_faddeev_leverrier(a), bounds=gamma * _faddeev_leverrier_magnitudes(a))


def _node_values(m: Matrix, nodes: Sequence[int], max_workers: int) -> List[NodeValue]:
    if max_workers <= 1:
        return [_node_value(m, s) for s in nodes]

    values: List[NodeValue] = [None] * len(nodes)
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(_node_value, m, s): k for k, s in enumerate(nodes)}
        for future in as_completed(futures):
            values[futures[future]] = future.result()
    return values


def _divided_differences(nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Newton coefficients for every column of values at once"""
    coef = np.array(values, copy=True)
    for k in range(1, len(nodes)):
        coef[k:] = (coef[k:] - coef[k - 1:-1]) / (nodes[k:] - nodes[:-k])[:, None]
    return coef


def _newton_to_monomial(nodes: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """Row j of the result multiplies sigma**j"""
    out = coef[-1:].copy()
    for k in range(len(nodes) - 2, -1, -1):
        shifted = np.zeros((out.shape[0] + 1, out.shape[1]), dtype=out.dtype)
        shifted[1:] += out
        shifted[:-1] -= nodes[k] * out
        shifted[0] += coef[k]
        out = shifted
    return out


def _interpolate(nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    return _newton_to_monomial(nodes, _divided_differences(nodes, values))


def coefficient_polynomials(m: Matrix, max_workers: int = 1) -> SigmaCharPoly:
    """
    Recover every p_i as a polynomial in sigma.

    Node values are computed in extended precision where the platform has it.
    Each interpolated coefficient gets an error bound (the node bounds pushed
    through the interpolation weights) and coefficients inside their bound are
    set to zero, so exact zeros of M's structure come out as exact zeros.

    Args:
        m: Input matrix
        max_workers: Threads for the n + 1 independent node evaluations

    Returns:
        SigmaCharPoly with deg p[i] <= n - i, p[n] == 1
    """
    a = as_array(m)
    if not isinstance(m, Matrix):
        m = Matrix.from_array(a)
    n = m.n
    warnings: List[str] = []
    if n > CONDITIONING_LIMIT:
        message = (f"n={n} exceeds {CONDITIONING_LIMIT}: interpolation at integer nodes "
                   f"is poorly conditioned, coefficient polynomials may be inaccurate")
        logger.warning(message)
        warnings.append(message)

    nodes = list(range(n + 1))
    evaluated = _node_values(m, nodes, max_workers)
    values = np.stack([v.values for v in evaluated])
    bounds = np.stack([v.bounds for v in evaluated])

    coeffs = _interpolate(np.array(nodes, dtype=WORKING_DTYPE), values)
    # weights[j, k]: coefficient of sigma**j in the Lagrange basis polynomial of node k
    weights = _interpolate(np.array(nodes, dtype=float), np.eye(n + 1))
    error = np.abs(weights) @ bounds
    coeffs[np.abs(coeffs) <= error] = 0

    polys = []
    for i in range(n + 1):
        polys.append(RealPoly(tuple(float(c) for c in coeffs[:n - i + 1, i])))
    logger.debug("recovered coefficient polynomials for n=%d", n)
    return SigmaCharPoly(n=n, p=tuple(polys), warnings=tuple(warnings))


def leading_diagonal_sums(m: Matrix) -> Tuple[float, ...]:
    """
    Elementary symmetric sums e_1..e_n of (-m_11, ..., -m_nn).

    e_{n-i} is the leading (degree n-i) coefficient of p_i.
    """
    d = [-v for v in m.diagonal]
    e = [1.0] + [0.0] * len(d)
    for k, value in enumerate(d, start=1):
        for j in range(k, 0, -1):
            e[j] += value * e[j - 1]
    return tuple(e[1:])

"""
Univariate real polynomials in sigma.

RealPoly holds dense ascending coefficients (coeffs[k] multiplies sigma**k).
Real roots are isolated with Sturm sequences on a Cauchy-bound interval,
refined by bisection and polished with Newton steps. Repeated roots are
handled by a square-free (Yun) decomposition built on a floating-point
Euclidean gcd. A decomposition whose gcds fail to divide is discarded in
favour of isolating on the Sturm chain of p itself.

This module never calls the eigenvalue solver: roots found here and the
crossing found by eig come from independent machinery.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from errors import NoConvergence, ZeroPolynomial

logger = logging.getLogger(__name__)

# Coefficients below NOISE_FLOOR * max|coeffs| at the top end are stripped
NOISE_FLOOR = 1e-13
# Relative cutoff under which a Euclidean remainder counts as zero
GCD_CUTOFF = 1e-12
# A remainder's leading coefficient below this fraction of its scale is dropped
LEAD_CUTOFF = 1e-8
# Relative remainder accepted when checking that a computed gcd divides
GCD_VERIFY = 1e-6
# |p^(k)(x)| below this fraction of its magnitude counts as vanishing
MULTIPLICITY_TOL = 1e-6
DEFAULT_TOL = 1e-10
MAX_REFINE_ITERS = 200
NEWTON_STEPS = 4

Number = Union[int, float]


def _canonical(values: Sequence[float]) -> Tuple[float, ...]:
    coeffs = [float(c) for c in values]
    if not coeffs:
        return (0.0,)
    for c in coeffs:
        if not math.isfinite(c):
            raise ValueError(f"polynomial coefficients must be finite, got {c!r}")
    scale = max(abs(c) for c in coeffs)
    if scale == 0.0:
        return (0.0,)
    while len(coeffs) > 1 and abs(coeffs[-1]) <= NOISE_FLOOR * scale:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class RealPoly:
    """Real polynomial with ascending coefficients, kept in canonical form"""
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _canonical(self.coeffs))

    @classmethod
    def constant(cls, value: Number) -> "RealPoly":
        return cls((float(value),))

    @classmethod
    def from_roots(cls, roots: Iterable[Number], leading: Number = 1.0) -> "RealPoly":
        """leading * prod (sigma - r)"""
        p = cls.constant(leading)
        for r in roots:
            p = p * cls((-float(r), 1.0))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    @property
    def leading(self) -> float:
        return self.coeffs[-1]

    @property
    def scale(self) -> float:
        """Largest absolute coefficient"""
        return max(abs(c) for c in self.coeffs)

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def __neg__(self) -> "RealPoly":
        return RealPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other: Union["RealPoly", Number]) -> "RealPoly":
        other = _as_poly(other)
        size = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0.0,) * (size - len(self.coeffs))
        b = other.coeffs + (0.0,) * (size - len(other.coeffs))
        return RealPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other: Union["RealPoly", Number]) -> "RealPoly":
        return self + (-_as_poly(other))

    def __mul__(self, other: Union["RealPoly", Number]) -> "RealPoly":
        other = _as_poly(other)
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0.0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RealPoly(tuple(out))

    __rmul__ = __mul__

    def derivative(self) -> "RealPoly":
        if self.degree == 0:
            return RealPoly((0.0,))
        return RealPoly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def monic(self) -> "RealPoly":
        if self.is_zero:
            raise ZeroPolynomial()
        lead = self.leading
        return RealPoly(tuple(c / lead for c in self.coeffs))

    def normalized(self) -> "RealPoly":
        """Positive rescaling to max|coeffs| = 1 (keeps every sign)"""
        if self.is_zero:
            return self
        s = self.scale
        return RealPoly(tuple(c / s for c in self.coeffs))

    def chop(self, cutoff: float) -> "RealPoly":
        """Zero every coefficient with |c| <= cutoff"""
        return RealPoly(tuple(0.0 if abs(c) <= cutoff else c for c in self.coeffs))


def _as_poly(value: Union[RealPoly, Number]) -> RealPoly:
    if isinstance(value, RealPoly):
        return value
    return RealPoly.constant(value)


def evaluate(p: RealPoly, x: float) -> float:
    """p(x) by Horner's scheme"""
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def magnitude(p: RealPoly, x: float) -> float:
    """sum_k |c_k| |x|^k, the scale against which |p(x)| is judged to be zero"""
    ax = abs(x)
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * ax + abs(c)
    return acc


def poly_divmod(a: RealPoly, b: RealPoly) -> Tuple[RealPoly, RealPoly]:
    """
    Long division a = q * b + r with deg r < deg b.

    Raises:
        ZeroPolynomial: If b is the zero polynomial
    """
    if b.is_zero:
        raise ZeroPolynomial("division by the zero polynomial")
    if a.degree < b.degree:
        return RealPoly((0.0,)), a
    db = b.degree
    lead = b.leading
    rem = list(a.coeffs)
    q = [0.0] * (a.degree - db + 1)
    for k in range(a.degree - db, -1, -1):
        coef = rem[k + db] / lead
        q[k] = coef
        if coef != 0.0:
            for j in range(db):
                rem[k + j] -= coef * b.coeffs[j]
        rem[k + db] = 0.0
    return RealPoly(tuple(q)), RealPoly(tuple(rem[:db]) if db > 0 else (0.0,))


def _euclid_remainder(a: RealPoly, b: RealPoly, cutoff: float) -> RealPoly:
    """
    rem(a, b) with the rounding noise of the division removed.

    Coefficients below cutoff times the dividend's magnitude are zeroed and a
    leading coefficient negligible next to the rest of the remainder is dropped.
    """
    q, r = poly_divmod(a, b)
    r = r.chop(cutoff * max(a.scale, q.scale * b.scale))
    while r.degree > 0 and abs(r.leading) <= LEAD_CUTOFF * r.scale:
        r = RealPoly(r.coeffs[:-1])
    return r


def poly_gcd(a: RealPoly, b: RealPoly, cutoff: float = GCD_CUTOFF) -> RealPoly:
    """
    Monic gcd by the Euclidean algorithm on max-normalized operands.

    A remainder whose coefficients all fall below `cutoff` (relative to the
    dividend) is treated as zero.
    """
    if a.is_zero and b.is_zero:
        raise ZeroPolynomial("gcd(0, 0) is undefined")
    if b.is_zero:
        return a.monic()
    if a.is_zero:
        return b.monic()
    if a.degree < b.degree:
        a, b = b, a
    a, b = a.normalized(), b.normalized()
    while not b.is_zero:
        if b.degree == 0:
            return RealPoly((1.0,))
        r = _euclid_remainder(a, b, cutoff)
        a, b = b, r.normalized()
    return a.monic()


def divides(g: RealPoly, p: RealPoly, tol: float = GCD_VERIFY) -> bool:
    """True when rem(p, g) is negligible next to p and to q * g"""
    if p.is_zero:
        return True
    q, r = poly_divmod(p.normalized(), g)
    return r.is_zero or r.scale <= tol * max(1.0, q.scale * g.scale)


def _exact_div(a: RealPoly, b: RealPoly) -> RealPoly:
    q, _ = poly_divmod(a, b)
    return q


def _verified_gcd(a: RealPoly, b: RealPoly) -> RealPoly:
    g = poly_gcd(a, b)
    if g.degree > 0 and not (divides(g, a) and divides(g, b)):
        raise NoConvergence(f"gcd of degree {g.degree} does not divide its operands")
    return g


def square_free_decomposition(p: RealPoly) -> List[Tuple[RealPoly, int]]:
    """
    Yun's algorithm: p = c * prod_k a_k**k with each a_k square-free.

    Every gcd is checked to divide its operands and the factor degrees must
    add up to deg p.

    Returns:
        (a_k, k) pairs for the non-constant factors

    Raises:
        ZeroPolynomial: For the zero polynomial
        NoConvergence: If the floating-point gcd chain is not consistent
    """
    if p.is_zero:
        raise ZeroPolynomial()
    if p.degree == 0:
        return []
    dp = p.derivative()
    g = _verified_gcd(p, dp)
    b = _exact_div(p, g)
    c = _exact_div(dp, g)
    d = c - b.derivative()
    factors: List[Tuple[RealPoly, int]] = []
    k = 1
    while b.degree > 0:
        if k > p.degree:
            raise NoConvergence(f"square-free decomposition did not terminate within {p.degree} steps")
        a = _verified_gcd(b, d) if not d.is_zero else b.monic()
        if a.degree > 0:
            factors.append((a, k))
        b = _exact_div(b, a)
        c = _exact_div(d, a)
        d = c - b.derivative()
        k += 1
    total = sum(k * a.degree for a, k in factors)
    if total != p.degree:
        raise NoConvergence(f"square-free factors account for degree {total}, expected {p.degree}")
    return factors


def square_free_part(p: RealPoly) -> RealPoly:
    """
    p / gcd(p, p'), same distinct roots as p, all simple.

    Raises:
        NoConvergence: If the computed gcd does not divide p and p'
    """
    if p.is_zero:
        raise ZeroPolynomial()
    if p.degree == 0:
        return p
    return _exact_div(p, _verified_gcd(p, p.derivative()))


def descartes_sign_changes(p: RealPoly) -> int:
    """
    Sign alternations in the coefficient sequence, zeros skipped.

    Bounds the number of positive real roots and matches it modulo 2.

    Raises:
        ZeroPolynomial: For the zero polynomial
    """
    if p.is_zero:
        raise ZeroPolynomial()
    return sign_variations(p.coeffs)


def sign_variations(values: Iterable[float]) -> int:
    changes = 0
    previous = 0.0
    for v in values:
        if v == 0.0:
            continue
        if previous != 0.0 and (v > 0.0) != (previous > 0.0):
            changes += 1
        previous = v
    return changes


def cauchy_bound(p: RealPoly) -> float:
    """1 + max_k |a_k| / |a_deg|; every root lies strictly inside (-bound, bound)"""
    if p.is_zero:
        raise ZeroPolynomial()
    if p.degree == 0:
        return 1.0
    lead = abs(p.leading)
    return 1.0 + max(abs(c) for c in p.coeffs[:-1]) / lead


def sturm_sequence(p: RealPoly) -> List[RealPoly]:
    """
    Sturm chain p, p', -rem(p, p'), ... with each member max-normalized.

    For p with repeated roots the chain ends at gcd(p, p') and still counts
    distinct roots.
    """
    if p.is_zero:
        raise ZeroPolynomial()
    seq = [p.normalized()]
    if p.degree == 0:
        return seq
    seq.append(p.derivative().normalized())
    while seq[-1].degree > 0:
        r = _euclid_remainder(seq[-2], seq[-1], GCD_CUTOFF)
        if r.is_zero:
            break
        seq.append((-r).normalized())
    return seq


def _variations_at(seq: Sequence[RealPoly], x: float) -> int:
    if math.isinf(x):
        values = []
        for s in seq:
            sign = math.copysign(1.0, s.leading)
            if x < 0 and s.degree % 2 == 1:
                sign = -sign
            values.append(sign)
        return sign_variations(values)
    return sign_variations(evaluate(s, x) for s in seq)


def sturm_count(p: RealPoly, a: float, b: float) -> int:
    """
    Number of distinct real roots of p in (a, b].

    Raises:
        ZeroPolynomial: For the zero polynomial
    """
    if a >= b:
        return 0
    seq = sturm_sequence(p)
    return max(0, _variations_at(seq, a) - _variations_at(seq, b))


@dataclass(frozen=True)
class Root:
    value: float
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class RootList:
    """Distinct real roots in ascending order with multiplicities and residuals"""
    roots: Tuple[Root, ...] = ()

    def __len__(self) -> int:
        return len(self.roots)

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __getitem__(self, index: int) -> Root:
        return self.roots[index]

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(r.value for r in self.roots)

    @property
    def max(self):
        return self.roots[-1].value if self.roots else None

    def within(self, a: float, b: float) -> "RootList":
        """Roots r with a < r <= b"""
        return RootList(tuple(r for r in self.roots if a < r.value <= b))


def _isolate(seq: Sequence[RealPoly], lo: float, hi: float) -> List[Tuple[float, float, int, int]]:
    v_lo, v_hi = _variations_at(seq, lo), _variations_at(seq, hi)
    stack = [(lo, hi, v_lo, v_hi, 0)]
    intervals = []
    while stack:
        a, b, va, vb, depth = stack.pop()
        count = va - vb
        if count <= 0:
            continue
        if count == 1:
            intervals.append((a, b, va, vb))
            continue
        mid = 0.5 * (a + b)
        if depth >= MAX_REFINE_ITERS or mid <= a or mid >= b:
            raise NoConvergence(f"could not separate {count} roots", interval=(a, b),
                                max_iters=MAX_REFINE_ITERS)
        vm = _variations_at(seq, mid)
        stack.append((a, mid, va, vm, depth + 1))
        stack.append((mid, b, vm, vb, depth + 1))
    intervals.sort()
    return intervals


def _refine(q: RealPoly, dq: RealPoly, seq: Sequence[RealPoly],
            a: float, b: float, va: int, tol: float) -> float:
    fa, fb = evaluate(q, a), evaluate(q, b)
    if fb == 0.0:
        return b
    use_signs = fa != 0.0 and (fa > 0.0) != (fb > 0.0)
    for _ in range(MAX_REFINE_ITERS):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if use_signs:
            fm = evaluate(q, mid)
            if fm == 0.0:
                return mid
            if (fm > 0.0) == (fa > 0.0):
                a, fa = mid, fm
            else:
                b = mid
        else:
            vm = _variations_at(seq, mid)
            if va - vm == 1:
                b = mid
            else:
                a, va = mid, vm
    else:
        raise NoConvergence(f"root refinement did not reach tol={tol}", interval=(a, b),
                            max_iters=MAX_REFINE_ITERS)

    x = 0.5 * (a + b)
    fx = evaluate(q, x)
    for _ in range(NEWTON_STEPS):
        slope = evaluate(dq, x)
        if slope == 0.0 or fx == 0.0:
            break
        x_new = x - fx / slope
        if not (a <= x_new <= b):
            break
        f_new = evaluate(q, x_new)
        if abs(f_new) >= abs(fx):
            break
        x, fx = x_new, f_new
    return x


def _simple_roots(q: RealPoly, tol: float) -> List[float]:
    bound = cauchy_bound(q)
    seq = sturm_sequence(q)
    dq = q.derivative()
    found = []
    for a, b, va, _ in _isolate(seq, -bound, bound):
        found.append(_refine(q, dq, seq, a, b, va, tol))
    return found


def _multiplicity_at(p: RealPoly, x: float) -> int:
    """Order of vanishing of p at x, judged against the magnitude of each derivative"""
    m = 1
    d = p.derivative()
    while m < p.degree and abs(evaluate(d, x)) <= MULTIPLICITY_TOL * magnitude(d, x):
        m += 1
        d = d.derivative()
    return m


def _merge(candidates: List[Tuple[float, int]], tol: float) -> List[List[float]]:
    merged: List[List[float]] = []
    for value, multiplicity in sorted(candidates):
        if merged and abs(value - merged[-1][0]) <= 10.0 * tol:
            merged[-1][1] += multiplicity
            continue
        merged.append([value, multiplicity])
    return merged


def _factored_candidates(p: RealPoly, tol: float) -> List[Tuple[float, int]]:
    candidates: List[Tuple[float, int]] = []
    for factor, multiplicity in square_free_decomposition(p):
        for r in _simple_roots(factor, tol):
            candidates.append((r, multiplicity))
    return candidates


def real_roots(p: RealPoly, tol: float = DEFAULT_TOL) -> RootList:
    """
    All real roots of p to absolute accuracy tol.

    Roots come from the square-free factors. When the decomposition is not
    trustworthy (a gcd that does not divide, or multiplicities adding up to
    more than deg p) the roots are isolated on the Sturm chain of p itself
    and multiplicities are read off the derivatives.

    Args:
        p: Nonzero polynomial
        tol: Target interval width for each root (> 0)

    Returns:
        RootList sorted ascending; multiplicities sum to at most deg p

    Raises:
        ZeroPolynomial: For the zero polynomial
        NoConvergence: If isolation or refinement exhausts its iteration budget
    """
    if p.is_zero:
        raise ZeroPolynomial("real_roots of the zero polynomial")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol!r}")
    if p.degree == 0:
        return RootList(())

    try:
        merged = _merge(_factored_candidates(p, tol), tol)
    except NoConvergence as exc:
        logger.debug("square-free path failed (%s); isolating on p directly", exc)
        merged = None
    if merged is not None and sum(m for _, m in merged) > p.degree:
        logger.debug("multiplicities exceed degree %d; isolating on p directly", p.degree)
        merged = None
    if merged is None:
        values = [v for v, _ in _merge([(r, 1) for r in _simple_roots(p, tol)], tol)]
        merged = [[v, _multiplicity_at(p, v)] for v in values]
        if sum(m for _, m in merged) > p.degree:
            logger.warning("cannot resolve multiplicities of a degree %d polynomial; reporting simple roots",
                           p.degree)
            merged = [[v, 1] for v in values]

    roots = tuple(Root(value=v, multiplicity=int(m), residual=abs(evaluate(p, v))) for v, m in merged)
    logger.debug("degree %d polynomial: %d distinct real roots", p.degree, len(roots))
    return RootList(roots)


def companion_matrix(p: RealPoly) -> np.ndarray:
    """
    Frobenius companion matrix of p made monic; its eigenvalues are the roots of p.

    Raises:
        ZeroPolynomial: If p has degree < 1
    """
    if p.is_zero or p.degree < 1:
        raise ZeroPolynomial("companion matrix needs degree >= 1")
    c = np.array(p.monic().coeffs)
    n = p.degree
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:n]
    return comp

"""
Stability checks on the sigma-parameterized family M_sigma.

Builds the root set Omega of the coefficient polynomials, finds the critical
sigma* where the spectral abscissa of M_sigma crosses zero, and checks the
relations between the two: max(Omega) == sigma* for a real crossing,
max(Omega) <= sigma* for a complex-pair crossing, the sign pattern of each
coefficient between its roots, and the scaling relation between p_0 and the
rescaled matrix Mbar0 = I - D^-1 M.

sigma* and max(Omega) come from separate pipelines: sigma* from QR
eigenvalues of M_sigma (eig), Omega from Sturm isolation on the interpolated
coefficient polynomials (sigmacharpoly, upoly).
"""

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from eig import Spectrum, eigenvalues, sigma_spectrum, spectral_abscissa
from errors import (
    ConfigError,
    NoBracket,
    NoConvergence,
    NonNegativeDiagonal,
    NotSigmaStable,
    SigmaStabError,
    ZeroDiagonal,
)
from matcore import Matrix, build_mbar0, gershgorin_sigma, inf_norm, lu_determinant, sigma_array
from sigmacharpoly import SigmaCharPoly, charpoly_at, coefficient_polynomials, leading_diagonal_sums
from upoly import RealPoly, RootList, companion_matrix, evaluate, magnitude, real_roots

logger = logging.getLogger(__name__)

MAX_BISECTION_ITERS = 200
# Distance above sigma* at which the necessary condition is sampled
NECESSARY_OFFSET = 1e-6


class CrossingClass(str, Enum):
    REAL = "RealCrossing"
    COMPLEX_PAIR = "ComplexPairCrossing"
    AMBIGUOUS = "Ambiguous"


class Sign(IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


class AnalysisOptions(BaseModel):
    """Tolerances and execution settings for analyze"""
    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-10, gt=0, description="Bisection width and root accuracy")
    theorem_tol: float = Field(1e-6, gt=0, description="Verdict tolerance, scaled by max(1, sigma*)")
    zero_tol: float = Field(1e-12, gt=0, description="Relative threshold for a Zero sign")
    bracket: Optional[Tuple[float, float]] = Field(None, description="User search interval for sigma*")
    certify_samples: int = Field(64, ge=1, description="Samples above sigma* checked for stability")
    max_workers: int = Field(1, ge=1, le=64)

    @field_validator("bracket")
    @classmethod
    def validate_bracket(cls, v):
        """Bracket must be finite with lo < hi"""
        if v is None:
            return v
        lo, hi = v
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError("bracket endpoints must be finite")
        if lo >= hi:
            raise ValueError(f"bracket needs lo < hi, got ({lo}, {hi})")
        return v

    @classmethod
    def create(cls, **kwargs) -> "AnalysisOptions":
        """
        Build options, wrapping validation failures.

        Raises:
            ConfigError: If a field violates its constraint
        """
        try:
            return cls(**kwargs)
        except ValidationError as e:
            raise ConfigError(f"Invalid analysis options: {e}") from e

    @classmethod
    def from_env(cls, **overrides) -> "AnalysisOptions":
        """
        Options seeded from SIGMA_STAB_TOL, SIGMA_STAB_THEOREM_TOL and
        SIGMA_STAB_WORKERS; keyword overrides win over the environment.
        """
        values = {}
        env_fields = (
            ("SIGMA_STAB_TOL", "tol", float),
            ("SIGMA_STAB_THEOREM_TOL", "theorem_tol", float),
            ("SIGMA_STAB_WORKERS", "max_workers", int),
        )
        for var, name, convert in env_fields:
            raw = os.environ.get(var)
            if raw is None or not raw.strip():
                continue
            try:
                values[name] = convert(raw.strip())
            except ValueError as e:
                raise ConfigError(f"{var}={raw!r} is not a valid {convert.__name__}") from e
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.create(**values)


@dataclass(frozen=True)
class OmegaSet:
    """Real roots of p_0..p_{n-1}; degenerate lists indices where p_i is identically zero"""
    per_coefficient: Tuple[RootList, ...]
    max_omega: Optional[float]
    degenerate: Tuple[int, ...] = ()


@dataclass(frozen=True)
class CriticalSigma:
    sigma_star: float
    crossing: CrossingClass
    certified_interval: Tuple[float, float]
    spectrum: Spectrum
    bracket: Tuple[float, float]
    iterations: int
    gershgorin_tail: bool
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Theorem2Verdict:
    holds: bool
    residual: Optional[float]
    tolerance: float


@dataclass(frozen=True)
class CorollaryVerdict:
    holds: bool
    slack: Optional[float]
    tolerance: float


@dataclass(frozen=True)
class TheoremCheck:
    """Theorem 2 or Corollary verdict, whichever the crossing class selects"""
    crossing: CrossingClass
    sigma_star: float
    max_omega: Optional[float]
    theorem2: Optional[Theorem2Verdict] = None
    corollary: Optional[CorollaryVerdict] = None
    warnings: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ScalingCheck:
    mbar0_abscissa: float
    p0_root_match_residual: float
    det_at_mbar0_abscissa: Optional[float]
    p0_at_mbar0_abscissa: Optional[float]
    min_abs_eigenvalue: Optional[float]
    p0_factor_residual: float
    leading_complex_mbar0: bool
    holds: bool


@dataclass(frozen=True)
class Theorem1Check:
    verified: bool
    violations: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CheckFailure:
    check: str
    error_type: str
    message: str


@dataclass(frozen=True)
class StabilityReport:
    n: int
    coefficients: SigmaCharPoly
    leading_diagonal_sums: Tuple[float, ...]
    omega: Optional[OmegaSet]
    sigma_star: Optional[float]
    crossing: Optional[CrossingClass]
    certified_interval: Optional[Tuple[float, float]]
    gershgorin: Optional[float]
    theorem2: Optional[Theorem2Verdict]
    corollary: Optional[CorollaryVerdict]
    scaling: Optional[ScalingCheck]
    sign_changes_verified: bool
    theorem1_violations: Tuple[str, ...]
    necessary_condition_verified: Optional[bool]
    failures: Tuple[CheckFailure, ...] = ()
    warnings: Tuple[str, ...] = ()
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def theorem_failed(self) -> bool:
        """A verdict came out false: a finding about M, not a crash"""
        if self.theorem2 is not None and not self.theorem2.holds:
            return True
        if self.corollary is not None and not self.corollary.holds:
            return True
        if self.scaling is not None and not self.scaling.holds:
            return True
        if self.necessary_condition_verified is False:
            return True
        if not self.sign_changes_verified:
            return True
        return any(f.error_type == NotSigmaStable.__name__ for f in self.failures)

    @property
    def all_checks_hold(self) -> bool:
        return not self.failures and not self.theorem_failed


def omega_set(scp: SigmaCharPoly, tol: float = 1e-10) -> OmegaSet:
    """
    Real roots of every p_i, i = 0..n-1.

    An identically zero p_i has no isolated roots; it gets an empty list and
    its index is recorded in degenerate.

    Raises:
        NoConvergence: Propagated from root isolation
    """
    per_coefficient: List[RootList] = []
    degenerate: List[int] = []
    for i in range(scp.n):
        p = scp.p[i]
        if p.is_zero:
            logger.warning("p_%d is identically zero", i)
            degenerate.append(i)
            per_coefficient.append(RootList(()))
            continue
        per_coefficient.append(real_roots(p, tol))

    maxima = [roots.max for roots in per_coefficient if len(roots)]
    max_omega = max(maxima) if maxima else None
    logger.debug("max(Omega) = %r", max_omega)
    return OmegaSet(per_coefficient=tuple(per_coefficient), max_omega=max_omega,
                    degenerate=tuple(degenerate))


def _sign(p: RealPoly, sigma: float, zero_tol: float) -> Sign:
    value = evaluate(p, sigma)
    if abs(value) <= zero_tol * magnitude(p, sigma):
        return Sign.ZERO
    return Sign.POSITIVE if value > 0.0 else Sign.NEGATIVE


def sign_table(scp: SigmaCharPoly, sigma: float, zero_tol: float = 1e-12) -> Tuple[Sign, ...]:
    """
    Sign of p_i(sigma) for i = 0..n.

    Zero is declared when |p_i(sigma)| <= zero_tol * sum_j |q_j| |sigma|**j.
    """
    return tuple(_sign(p, sigma, zero_tol) for p in scp.p)


def coefficients_positive(scp: SigmaCharPoly, sigma: float, zero_tol: float = 1e-12) -> bool:
    """Necessary condition for stability of M_sigma: every p_i(sigma) > 0"""
    return all(s == Sign.POSITIVE for s in sign_table(scp, sigma, zero_tol))


def leading_coefficients_positive(m: Matrix) -> bool:
    """All elementary symmetric sums e_k of the negated diagonal are positive"""
    return all(e > 0.0 for e in leading_diagonal_sums(m))


def _classify(spectrum: Spectrum) -> CrossingClass:
    if spectrum.leading_is_mixed:
        return CrossingClass.AMBIGUOUS
    if spectrum.real_crossing:
        return CrossingClass.REAL
    return CrossingClass.COMPLEX_PAIR


def critical_sigma(m: Matrix, tol: float = 1e-10, bracket: Optional[Tuple[float, float]] = None,
                   certify_samples: int = 64) -> CriticalSigma:
    """
    Locate sigma* where the spectral abscissa of M_sigma crosses zero.

    Args:
        m: Input matrix
        tol: Final bisection width
        bracket: Search interval (lo, hi); defaults to [0, sigma_G + 1], which
            needs a strictly negative diagonal
        certify_samples: Points in (sigma*, hi] where the abscissa must be
            negative; also the resolution of the downward pre-scan

    The pre-scan walks a uniform grid from hi towards lo and bisects between
    the first point with abscissa >= 0 and its upper neighbour.

    Returns:
        CriticalSigma with the crossing class read from the spectrum at sigma*

    Raises:
        NoBracket: No default bracket (nonnegative diagonal) or no sign change on bracket
        NotSigmaStable: A sampled sigma above sigma* has abscissa >= tol
        NoConvergence: Bisection budget exhausted
    """
    sigma_g: Optional[float] = None
    try:
        sigma_g = gershgorin_sigma(m)
    except NonNegativeDiagonal as e:
        if bracket is None:
            raise NoBracket(f"{e}; supply a bracket to search for sigma*") from e

    user_bracket = bracket is not None
    lo, hi = bracket if user_bracket else (0.0, sigma_g + 1.0)
    f_lo = spectral_abscissa(m, lo)
    f_hi = spectral_abscissa(m, hi)
    logger.debug("bracket [%r, %r]: abscissa %r .. %r", lo, hi, f_lo, f_hi)
    if f_hi >= 0.0:
        raise NoBracket(f"abscissa {f_hi:.3e} >= 0 at the upper end sigma={hi!r}")
    # Zero trace makes abscissa(0) >= 0 exactly; only a user bracket can miss the crossing
    if user_bracket and f_lo < 0.0:
        raise NoBracket(f"abscissa {f_lo:.3e} < 0 at both ends of [{lo!r}, {hi!r}]")

    # coarse scan down from hi so bisection targets the topmost crossing
    a, b = lo, hi
    step = (hi - lo) / certify_samples
    for k in range(certify_samples - 1, 0, -1):
        s = lo + step * k
        if spectral_abscissa(m, s) >= 0.0:
            a = s
            break
        b = s

    iterations = 0
    for iterations in range(1, MAX_BISECTION_ITERS + 1):
        if b - a <= tol:
            break
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if spectral_abscissa(m, mid) >= 0.0:
            a = mid
        else:
            b = mid
    else:
        raise NoConvergence(f"bisection did not reach width {tol!r}",
                            interval=(a, b), max_iters=MAX_BISECTION_ITERS)

    sigma_star = 0.5 * (a + b)
    spectrum = sigma_spectrum(m, sigma_star)
    crossing = _classify(spectrum)
    logger.debug("sigma* = %r after %d iterations, %s", sigma_star, iterations, crossing.value)

    width = hi - sigma_star
    for k in range(1, certify_samples + 1):
        s = sigma_star + width * k / certify_samples
        abscissa = spectral_abscissa(m, s)
        if abscissa >= tol:
            raise NotSigmaStable(s, abscissa)

    warnings: List[str] = []
    if sigma_star <= tol:
        warnings.append(f"crossing at the sigma = 0 boundary (sigma* = {sigma_star:.3e})")
    if crossing == CrossingClass.AMBIGUOUS:
        warnings.append("leading eigenvalues at sigma* mix a real eigenvalue and a complex pair")
    for w in warnings:
        logger.warning(w)

    return CriticalSigma(
        sigma_star=sigma_star,
        crossing=crossing,
        certified_interval=(sigma_star, hi),
        spectrum=spectrum,
        bracket=(lo, hi),
        iterations=iterations,
        gershgorin_tail=sigma_g is not None and hi > sigma_g,
        warnings=tuple(warnings),
    )


def check_theorem2(m: Matrix, tol: float = 1e-10, theorem_tol: float = 1e-6, *,
                   critical: Optional[CriticalSigma] = None, omega: Optional[OmegaSet] = None,
                   scp: Optional[SigmaCharPoly] = None) -> TheoremCheck:
    """
    Compare sigma* with max(Omega).

    RealCrossing: max(Omega) == sigma*, residual |sigma* - max(Omega)|.
    ComplexPairCrossing: max(Omega) <= sigma*, slack sigma* - max(Omega).
    Ambiguous crossings get neither verdict.

    theorem_tol is relative: the effective tolerance is theorem_tol * max(1, sigma*).
    Precomputed critical/omega/scp are reused when given.
    """
    if critical is None:
        critical = critical_sigma(m, tol)
    if omega is None:
        omega = omega_set(scp if scp is not None else coefficient_polynomials(m), tol)

    sigma_star = critical.sigma_star
    max_omega = omega.max_omega
    tolerance = theorem_tol * max(1.0, abs(sigma_star))
    warnings: List[str] = []
    theorem2 = corollary = None

    if critical.crossing == CrossingClass.REAL:
        if max_omega is None:
            warnings.append("RealCrossing with no real root in any p_i")
            theorem2 = Theorem2Verdict(holds=False, residual=None, tolerance=tolerance)
        else:
            residual = abs(sigma_star - max_omega)
            theorem2 = Theorem2Verdict(holds=residual <= tolerance, residual=residual,
                                       tolerance=tolerance)
    elif critical.crossing == CrossingClass.COMPLEX_PAIR:
        if max_omega is None:
            warnings.append("max(Omega) absent for a sigma-stable matrix")
            corollary = CorollaryVerdict(holds=True, slack=None, tolerance=tolerance)
        else:
            slack = sigma_star - max_omega
            corollary = CorollaryVerdict(holds=slack >= -tolerance, slack=slack, tolerance=tolerance)
    else:
        warnings.append("Ambiguous crossing: Theorem 2 and Corollary verdicts skipped")

    for w in warnings:
        logger.warning(w)
    return TheoremCheck(crossing=critical.crossing, sigma_star=sigma_star, max_omega=max_omega,
                        theorem2=theorem2, corollary=corollary, warnings=tuple(warnings))


def _p0_roots(p0: RealPoly) -> List[complex]:
    # exact zero roots are split off; a nilpotent companion block loses accuracy
    coeffs = p0.coeffs
    zeros = 0
    while zeros < p0.degree and coeffs[zeros] == 0.0:
        zeros += 1
    roots = [0j] * zeros
    rest = RealPoly(coeffs[zeros:])
    if rest.degree >= 1:
        roots.extend(eigenvalues(companion_matrix(rest), balance=True).eigenvalues)
    return roots


def _match_residual(left: List[complex], right: List[complex]) -> float:
    """
    Greedy nearest-neighbour matching; largest relative distance.

    A pair inside a cluster of k nearby eigenvalues contributes distance**k:
    a k-fold root moves by the k-th root of a coefficient perturbation.
    """
    if len(left) != len(right):
        return math.inf
    unused = list(right)
    worst = 0.0
    for z in sorted(left, key=lambda w: (w.real, w.imag)):
        k = min(range(len(unused)), key=lambda j: abs(unused[j] - z))
        w = unused.pop(k)
        distance = abs(w - z)
        cluster = sum(1 for y in left if abs(y - z) <= 2.0 * distance)
        worst = max(worst, (distance / max(1.0, abs(z))) ** max(1, cluster))
    return worst


def check_scaling_relation(m: Matrix, tol: float = 1e-6, *,
                           scp: Optional[SigmaCharPoly] = None) -> ScalingCheck:
    """
    Check that the eigenvalues of Mbar0 are the roots of p_0.

    (a) The eigenvalue multiset of Mbar0 matches the root multiset of p_0
        (complex roots from the companion matrix of p_0).
    (b) When the leading eigenvalue of Mbar0 is real, sigma_hat = its
        abscissa zeroes p_0 and makes M_sigma_hat singular.

    p0_factor_residual measures p_0 against (-1)**n det(D) times the
    characteristic polynomial of Mbar0; the two agree up to that factor.

    Raises:
        ZeroDiagonal: If some m_ii is zero
    """
    mbar0 = build_mbar0(m)
    if scp is None:
        scp = coefficient_polynomials(m)
    p0 = scp.p[0]
    n = m.n

    mbar_spectrum = eigenvalues(mbar0)
    match = _match_residual(list(mbar_spectrum.eigenvalues), _p0_roots(p0))
    holds = match <= tol

    factor = (-1.0) ** n * math.prod(m.diagonal)
    char_mbar0 = charpoly_at(mbar0, 1.0)
    p0_coeffs = list(p0.coeffs) + [0.0] * (n + 1 - len(p0.coeffs))
    scale = max(abs(c) for c in p0_coeffs)
    factor_residual = max(abs(p - factor * c) for p, c in zip(p0_coeffs, char_mbar0)) / scale

    sigma_hat = mbar_spectrum.abscissa
    leading_complex = not mbar_spectrum.real_crossing
    det_at = p0_at = min_abs = None
    if not leading_complex:
        p0_at = evaluate(p0, sigma_hat)
        m_hat = sigma_array(m, sigma_hat)
        det_at = lu_determinant(m_hat)
        min_abs = min(abs(z) for z in eigenvalues(m_hat).eigenvalues)
        holds = (holds
                 and abs(p0_at) <= tol * max(p0.scale, magnitude(p0, sigma_hat))
                 and min_abs <= tol * inf_norm(m_hat))
    else:
        logger.info("leading eigenvalue of Mbar0 is complex; only the multiset check applies")

    logger.debug("scaling: match %.3e, factor residual %.3e", match, factor_residual)
    return ScalingCheck(
        mbar0_abscissa=sigma_hat,
        p0_root_match_residual=match,
        det_at_mbar0_abscissa=det_at,
        p0_at_mbar0_abscissa=p0_at,
        min_abs_eigenvalue=min_abs,
        p0_factor_residual=factor_residual,
        leading_complex_mbar0=leading_complex,
        holds=holds,
    )


def verify_theorem1(scp: SigmaCharPoly, omega: OmegaSet, zero_tol: float = 1e-12) -> Theorem1Check:
    """
    Sign pattern of each p_i around its real roots.

    Between consecutive distinct roots the sign is sampled at the midpoint;
    crossing a root of odd multiplicity flips it, an even one keeps it.
    Beyond the largest root p_i has the sign of its leading coefficient.
    """
    violations: List[str] = []
    for i, roots in enumerate(omega.per_coefficient):
        p = scp.p[i]
        if p.is_zero or not len(roots):
            continue
        values = roots.values
        points = [0.5 * (x + y) for x, y in zip(values, values[1:])]
        points.append(values[-1] + 1.0)
        signs = [_sign(p, s, zero_tol) for s in points]

        for k, s in enumerate(signs):
            if s == Sign.ZERO:
                violations.append(f"p_{i}: zero sign at sigma={points[k]!r} between roots")
        for k in range(len(signs) - 1):
            flips = roots[k + 1].multiplicity % 2 == 1
            if (signs[k + 1] == -signs[k]) != flips:
                violations.append(f"p_{i}: sign pattern broken at root {values[k + 1]!r}")
        expected = Sign.POSITIVE if p.leading > 0.0 else Sign.NEGATIVE
        if signs[-1] != expected:
            violations.append(f"p_{i}: sign beyond largest root {values[-1]!r} is {signs[-1].name}")

    for v in violations:
        logger.warning("Theorem 1 check: %s", v)
    return Theorem1Check(verified=not violations, violations=tuple(violations))


def _timed(fn: Callable, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, (time.perf_counter() - start) * 1000.0


def analyze(m: Matrix, opts: Optional[AnalysisOptions] = None) -> StabilityReport:
    """
    Run every check on M and collect the results into one report.

    Sub-checks that raise a SigmaStabError are recorded as failures and the
    remaining checks still run.

    Args:
        m: Input matrix
        opts: Tolerances and worker count; defaults to AnalysisOptions()

    Returns:
        StabilityReport
    """
    opts = opts or AnalysisOptions()
    timings: Dict[str, float] = {}
    warnings: List[str] = []
    failures: List[CheckFailure] = []

    logger.info("analyzing %dx%d matrix", m.n, m.n)
    scp, timings["coefficient_polynomials"] = _timed(coefficient_polynomials, m, opts.max_workers)
    warnings.extend(scp.warnings)

    stages = {
        "omega_set": (omega_set, (scp, opts.tol), {}),
        "critical_sigma": (critical_sigma, (m, opts.tol, opts.bracket, opts.certify_samples), {}),
        "scaling": (check_scaling_relation, (m, opts.theorem_tol), {"scp": scp}),
        "gershgorin": (gershgorin_sigma, (m,), {}),
    }
    results: Dict[str, object] = {}
    errors: Dict[str, SigmaStabError] = {}
    with ThreadPoolExecutor(max_workers=opts.max_workers) as executor:
        futures = {executor.submit(_timed, fn, *args, **kwargs): name
                   for name, (fn, args, kwargs) in stages.items()}
        for future in as_completed(futures):
            name = futures[future]
            try:
                results[name], timings[name] = future.result()
            except SigmaStabError as e:
                errors[name] = e

    # deterministic join: stage order, not completion order
    for name in stages:
        if name not in errors:
            continue
        e = errors[name]
        if name == "gershgorin" and isinstance(e, NonNegativeDiagonal):
            warnings.append(f"gershgorin: Unavailable ({e})")
        elif name == "scaling" and isinstance(e, ZeroDiagonal):
            warnings.append(f"scaling: Unavailable ({e})")
        elif name == "critical_sigma" and isinstance(e, NoBracket) and opts.bracket is None:
            warnings.append(f"sigma_star: Unavailable ({e})")
        else:
            logger.error("%s failed: %s", name, e)
            failures.append(CheckFailure(check=name, error_type=type(e).__name__, message=str(e)))

    omega: Optional[OmegaSet] = results.get("omega_set")
    critical: Optional[CriticalSigma] = results.get("critical_sigma")
    scaling: Optional[ScalingCheck] = results.get("scaling")
    gershgorin: Optional[float] = results.get("gershgorin")
    if critical is not None:
        warnings.extend(critical.warnings)
    if omega is not None and omega.degenerate:
        warnings.append(f"identically zero coefficients p_i for i in {list(omega.degenerate)}")
    if scaling is not None and scaling.leading_complex_mbar0:
        warnings.append("scaling: leading eigenvalue of Mbar0 is complex, only the multiset check applies")

    theorem: Optional[TheoremCheck] = None
    if critical is not None and omega is not None:
        theorem, timings["check_theorem2"] = _timed(
            check_theorem2, m, opts.tol, opts.theorem_tol, critical=critical, omega=omega)
        warnings.extend(theorem.warnings)

    theorem1 = Theorem1Check(verified=False, violations=("Omega unavailable",))
    if omega is not None:
        theorem1, timings["theorem1"] = _timed(verify_theorem1, scp, omega, opts.zero_tol)

    necessary: Optional[bool] = None
    if critical is not None:
        s = critical.sigma_star + NECESSARY_OFFSET * max(1.0, critical.sigma_star)
        necessary = coefficients_positive(scp, s, opts.zero_tol)
        if not necessary:
            logger.warning("coefficients of M_sigma not all positive at sigma=%r above sigma*", s)

    report = StabilityReport(
        n=m.n,
        coefficients=scp,
        leading_diagonal_sums=leading_diagonal_sums(m),
        omega=omega,
        sigma_star=critical.sigma_star if critical else None,
        crossing=critical.crossing if critical else None,
        certified_interval=critical.certified_interval if critical else None,
        gershgorin=gershgorin,
        theorem2=theorem.theorem2 if theorem else None,
        corollary=theorem.corollary if theorem else None,
        scaling=scaling,
        sign_changes_verified=theorem1.verified,
        theorem1_violations=theorem1.violations,
        necessary_condition_verified=necessary,
        failures=tuple(failures),
        warnings=tuple(warnings),
        timings=timings,
    )
    logger.info("analysis done in %.1f ms", sum(timings.values()))
    return report

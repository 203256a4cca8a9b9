import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from errors import ReportValidationError
from matcore import Matrix
from stability import CrossingClass, StabilityReport

SCHEMA_VERSION = "1"

# Top-level fields that may be null, each only with a warning naming it
NULLABLE_FIELDS = ("sigma_star", "gershgorin", "scaling", "omega")


class InputEcho(BaseModel):
    """The analyzed input; matrix re-parses bit-for-bit"""
    path: str
    n: int = Field(..., ge=1)
    matrix: Matrix


class RootEntry(BaseModel):
    value: float
    multiplicity: int = Field(..., ge=1)
    residual: float = Field(..., ge=0)


class OmegaDocument(BaseModel):
    """Real roots of p_0..p_{n-1}"""
    per_coefficient: List[List[RootEntry]]
    max_omega: Optional[float] = None
    degenerate: List[int] = Field(default_factory=list)


class Theorem2Document(BaseModel):
    holds: bool
    residual: Optional[float] = Field(None, ge=0)
    tolerance: float = Field(..., gt=0)


class CorollaryDocument(BaseModel):
    holds: bool
    slack: Optional[float] = None
    tolerance: float = Field(..., gt=0)


class ScalingDocument(BaseModel):
    mbar0_abscissa: float
    p0_root_match_residual: float = Field(..., ge=0)
    det_at_mbar0_abscissa: Optional[float] = None
    p0_at_mbar0_abscissa: Optional[float] = None
    min_abs_eigenvalue: Optional[float] = Field(None, ge=0)
    p0_factor_residual: float = Field(..., ge=0)
    leading_complex_mbar0: bool
    holds: bool


class FailureDocument(BaseModel):
    check: str = Field(..., min_length=1)
    error_type: str = Field(..., min_length=1)
    message: str


class ReportDocument(BaseModel):
    """Complete analysis report as written by the CLI"""
    schema_version: str = Field(SCHEMA_VERSION, pattern=r'^1$')
    input: InputEcho
    n: int = Field(..., ge=1)
    sigma_star: Optional[float] = None
    crossing: Optional[CrossingClass] = None
    certified_interval: Optional[Tuple[float, float]] = None
    gershgorin: Optional[float] = Field(None, ge=0)
    coefficients: List[List[float]] = Field(..., description="p_i coefficients ascending in sigma")
    leading_diagonal_sums: List[float]
    omega: Optional[OmegaDocument] = None
    theorem2: Optional[Theorem2Document] = None
    corollary: Optional[CorollaryDocument] = None
    scaling: Optional[ScalingDocument] = None
    sign_changes_verified: bool
    theorem1_violations: List[str] = Field(default_factory=list)
    necessary_condition_verified: Optional[bool] = None
    failures: List[FailureDocument] = Field(default_factory=list)
    timings: Dict[str, float] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_numbers(self) -> "ReportDocument":
        """Every number finite; a null field needs a warning that names it"""
        bad = _non_finite(self.model_dump(exclude={"input"}))
        if bad:
            raise ValueError(f"non-finite number at {bad}")
        for name in NULLABLE_FIELDS:
            if getattr(self, name) is None and not any(w.startswith(f"{name}:") for w in self.warnings):
                raise ValueError(f"{name} is null without a matching warning")
        if len(self.coefficients) != self.n + 1:
            raise ValueError(f"expected {self.n + 1} coefficient polynomials, got {len(self.coefficients)}")
        if self.input.n != self.n:
            raise ValueError(f"input echo has n={self.input.n}, report has n={self.n}")
        return self


def _non_finite(value: Any, path: str = "") -> Optional[str]:
    if isinstance(value, float):
        return None if math.isfinite(value) else path or "<root>"
    if isinstance(value, dict):
        items = value.items()
    elif isinstance(value, (list, tuple)):
        items = enumerate(value)
    else:
        return None
    for key, item in items:
        found = _non_finite(item, f"{path}.{key}" if path else str(key))
        if found:
            return found
    return None


def _dataclass_dict(obj: Any) -> Optional[Dict[str, Any]]:
    return None if obj is None else dict(obj.__dict__)


def build_report_document(report: StabilityReport, input_path: str, matrix: Matrix,
                          warnings: Sequence[str] = ()) -> ReportDocument:
    """
    Convert a StabilityReport into the serializable ReportDocument.

    Null fields get an "<field>: Unavailable" warning when the report does not
    already carry one.

    Raises:
        ReportValidationError: If the report holds non-finite numbers
    """
    all_warnings = list(report.warnings) + list(warnings)
    for failure in report.failures:
        all_warnings.append(f"{failure.check} failed: {failure.error_type}: {failure.message}")

    omega = None
    if report.omega is not None:
        omega = {
            "per_coefficient": [[_dataclass_dict(r) for r in roots] for roots in report.omega.per_coefficient],
            "max_omega": report.omega.max_omega,
            "degenerate": list(report.omega.degenerate),
        }

    data = {
        "schema_version": SCHEMA_VERSION,
        "input": {"path": str(input_path), "n": matrix.n, "matrix": matrix},
        "n": report.n,
        "sigma_star": report.sigma_star,
        "crossing": report.crossing,
        "certified_interval": report.certified_interval,
        "gershgorin": report.gershgorin,
        "coefficients": [list(p.coeffs) for p in report.coefficients.p],
        "leading_diagonal_sums": list(report.leading_diagonal_sums),
        "omega": omega,
        "theorem2": _dataclass_dict(report.theorem2),
        "corollary": _dataclass_dict(report.corollary),
        "scaling": _dataclass_dict(report.scaling),
        "sign_changes_verified": report.sign_changes_verified,
        "theorem1_violations": list(report.theorem1_violations),
        "necessary_condition_verified": report.necessary_condition_verified,
        "failures": [_dataclass_dict(f) for f in report.failures],
        "timings": dict(report.timings),
    }
    for name in NULLABLE_FIELDS:
        if data[name] is None and not any(w.startswith(f"{name}:") for w in all_warnings):
            all_warnings.append(f"{name}: Unavailable")
    data["warnings"] = all_warnings

    try:
        return ReportDocument(**data)
    except ValidationError as e:
        raise ReportValidationError(f"Report validation failed: {str(e)}") from e


def validate_report_document(data: Dict[str, Any]) -> ReportDocument:
    """
    Validate a report dictionary (for example a parsed JSON report).

    Args:
        data: Report as dictionary; keys starting with '_' are ignored

    Returns:
        The validated ReportDocument

    Raises:
        ReportValidationError: If validation fails
    """
    try:
        clean = {k: v for k, v in data.items() if not k.startswith('_')}
        return ReportDocument(**clean)
    except ValidationError as e:
        raise ReportValidationError(f"Report validation failed: {str(e)}") from e
    except TypeError as e:
        raise ReportValidationError(f"Report validation failed: {str(e)}") from e


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.10g}"


def _verdict(holds: bool) -> str:
    return "holds" if holds else "FAILS"


def render_text_summary(doc: ReportDocument) -> str:
    """Human-readable summary: sigma*, crossing class and verdicts"""
    lines = [
        f"sigma-stab report (schema {doc.schema_version})",
        f"input: {doc.input.path} (n={doc.n})",
    ]
    crossing = doc.crossing.value if doc.crossing is not None else "n/a"
    lines.append(f"sigma*: {_fmt(doc.sigma_star)}  [{crossing}]")
    if doc.certified_interval is not None:
        lo, hi = doc.certified_interval
        lines.append(f"certified stable on ({_fmt(lo)}, {_fmt(hi)}]")
    lines.append(f"max(Omega): {_fmt(doc.omega.max_omega if doc.omega else None)}")
    lines.append(f"gershgorin sigma_G: {_fmt(doc.gershgorin)}")

    if doc.theorem2 is not None:
        lines.append(f"Theorem 2: {_verdict(doc.theorem2.holds)} "
                     f"(residual {_fmt(doc.theorem2.residual)}, tol {_fmt(doc.theorem2.tolerance)})")
    if doc.corollary is not None:
        lines.append(f"Corollary: {_verdict(doc.corollary.holds)} "
                     f"(slack {_fmt(doc.corollary.slack)}, tol {_fmt(doc.corollary.tolerance)})")
    if doc.scaling is not None:
        lines.append(f"Scaling relation: {_verdict(doc.scaling.holds)} "
                     f"(root match {_fmt(doc.scaling.p0_root_match_residual)})")
    lines.append(f"Theorem 1 sign pattern: {'verified' if doc.sign_changes_verified else 'VIOLATED'}")
    if doc.necessary_condition_verified is not None:
        lines.append(f"positive coefficients above sigma*: {_verdict(doc.necessary_condition_verified)}")

    for failure in doc.failures:
        lines.append(f"failure [{failure.check}] {failure.error_type}: {failure.message}")
    for warning in doc.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"

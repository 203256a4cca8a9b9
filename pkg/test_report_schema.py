"""Tests that report validation accepts real reports and rejects broken ones"""
import json

import pytest

from errors import ReportValidationError
from matcore import Matrix
from report_schema import (
    SCHEMA_VERSION,
    build_report_document,
    render_text_summary,
    validate_report_document,
)
from stability import analyze

A = Matrix.from_rows([[-1.0, 2.0], [2.0, -1.0]])
ZERO_DIAG = Matrix.from_rows([[0.0, 1.0], [1.0, -1.0]])


@pytest.fixture(scope="module")
def report_a():
    return analyze(A)


@pytest.fixture
def valid_report(report_a):
    doc = build_report_document(report_a, "fixture_a.csv", A)
    return json.loads(doc.model_dump_json())


def test_valid_report_passes(valid_report):
    doc = validate_report_document(valid_report)
    assert doc.schema_version == SCHEMA_VERSION
    assert doc.crossing.value == "RealCrossing"
    assert doc.theorem2.holds
    assert doc.input.matrix.entries == A.entries


def test_matrix_echo_reparses_bit_for_bit():
    rows = [[-0.1, 1.0 / 3.0], [2.0 ** -40, -7.25]]
    m = Matrix.from_rows(rows)
    report = analyze(m)
    data = json.loads(build_report_document(report, "m.json", m).model_dump_json())
    again = Matrix.model_validate(data["input"]["matrix"])
    assert again.entries == m.entries


def test_unavailable_fields_carry_warnings():
    doc = build_report_document(analyze(ZERO_DIAG), "z.csv", ZERO_DIAG)
    assert doc.scaling is None and doc.sigma_star is None and doc.gershgorin is None
    for name in ("scaling", "sigma_star", "gershgorin"):
        assert any(w.startswith(f"{name}:") for w in doc.warnings)
    validate_report_document(json.loads(doc.model_dump_json()))


def test_null_without_warning_rejected(valid_report):
    valid_report["sigma_star"] = None
    with pytest.raises(ReportValidationError, match="sigma_star"):
        validate_report_document(valid_report)


def test_non_finite_number_rejected(valid_report):
    valid_report["timings"]["omega_set"] = float("inf")
    with pytest.raises(ReportValidationError, match="non-finite"):
        validate_report_document(valid_report)


def test_wrong_schema_version_rejected(valid_report):
    valid_report["schema_version"] = "2"
    with pytest.raises(ReportValidationError):
        validate_report_document(valid_report)


def test_coefficient_count_must_match_dimension(valid_report):
    valid_report["coefficients"] = valid_report["coefficients"][:-1]
    with pytest.raises(ReportValidationError):
        validate_report_document(valid_report)


def test_unknown_crossing_rejected(valid_report):
    valid_report["crossing"] = "Sideways"
    with pytest.raises(ReportValidationError):
        validate_report_document(valid_report)


def test_internal_keys_are_ignored(valid_report):
    valid_report["_source"] = "test"
    validate_report_document(valid_report)


def test_text_summary(report_a):
    text = render_text_summary(build_report_document(report_a, "fixture_a.csv", A))
    assert "RealCrossing" in text
    assert "Theorem 2: holds" in text
    assert "Scaling relation: holds" in text
    assert "fixture_a.csv (n=2)" in text

"""Tests for matrix construction, derived matrices and matrix file formats"""
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from errors import InvalidSigma, MatrixError, MatrixParseError, NonNegativeDiagonal, ZeroDiagonal
from matcore import (
    Matrix,
    build_mbar0,
    build_sigma_matrix,
    dump_matrix_json,
    gershgorin_sigma,
    inf_norm,
    load_matrix,
    lu_determinant,
    parse_matrix_csv,
    parse_matrix_json,
    sigma_array,
)

FIXTURES = Path(__file__).parent / "fixtures"

A = [[-1.0, 2.0], [2.0, -1.0]]
B = [[-1.0, -2.0], [2.0, -1.0]]


def test_from_rows_builds_square_matrix():
    m = Matrix.from_rows(A)
    assert m.n == 2
    assert m.diagonal == (-1.0, -1.0)
    assert_array_equal(m.array, np.array(A))


def test_array_is_read_only():
    m = Matrix.from_rows(A)
    with pytest.raises(ValueError):
        m.array[0, 0] = 5.0


@pytest.mark.parametrize("rows", [
    [[1.0, 2.0], [3.0]],
    [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]],
    [[float("nan"), 0.0], [0.0, -1.0]],
    [[float("inf"), 0.0], [0.0, -1.0]],
    [],
])
def test_from_rows_rejects_invalid_input(rows):
    with pytest.raises(MatrixError):
        Matrix.from_rows(rows)


def test_sigma_matrix_scales_only_the_diagonal():
    m = Matrix.from_rows(A)
    assert_array_equal(build_sigma_matrix(m, 3.0).array, [[-3.0, 2.0], [2.0, -3.0]])
    assert_array_equal(build_sigma_matrix(m, 1.0).array, m.array)
    assert_array_equal(sigma_array(m, 0.0), [[0.0, 2.0], [2.0, 0.0]])


@pytest.mark.parametrize("sigma", [float("nan"), float("inf"), "abc"])
def test_sigma_must_be_finite(sigma):
    with pytest.raises(InvalidSigma):
        build_sigma_matrix(Matrix.from_rows(A), sigma)


def test_mbar0_examples():
    assert_array_equal(build_mbar0(Matrix.from_rows(A)).array, [[0.0, 2.0], [2.0, 0.0]])
    assert_array_equal(build_mbar0(Matrix.from_rows(B)).array, [[0.0, -2.0], [2.0, 0.0]])
    diag = Matrix.from_rows(np.diag([-1.0, -2.0, -3.0]))
    assert_array_equal(build_mbar0(diag).array, np.zeros((3, 3)))


def test_mbar0_diagonal_is_exactly_zero():
    rng = np.random.default_rng(7)
    a = rng.uniform(-5, 5, size=(6, 6))
    np.fill_diagonal(a, rng.uniform(-5, -0.1, size=6))
    mbar0 = build_mbar0(Matrix.from_array(a))
    assert np.all(np.diag(mbar0.array) == 0.0)


def test_mbar0_zero_diagonal_reports_one_based_index():
    with pytest.raises(ZeroDiagonal) as exc:
        build_mbar0(Matrix.from_rows([[0.0, 1.0], [1.0, -1.0]]))
    assert exc.value.index == 1


def test_gershgorin_examples():
    assert gershgorin_sigma(Matrix.from_rows(A)) == 2.0
    assert gershgorin_sigma(Matrix.from_rows(np.diag([-1.0, -2.0, -3.0]))) == 0.0
    assert gershgorin_sigma(Matrix.from_rows([[-2.0, 1.0], [3.0, -1.0]])) == 3.0


def test_gershgorin_bound_gives_negative_abscissa():
    rng = np.random.default_rng(11)
    a = rng.uniform(-5, 5, size=(5, 5))
    np.fill_diagonal(a, rng.uniform(-5, -0.5, size=5))
    m = Matrix.from_array(a)
    sigma = gershgorin_sigma(m) * 1.001
    assert np.max(np.linalg.eigvals(sigma_array(m, sigma)).real) < 0.0


def test_gershgorin_nonnegative_diagonal():
    with pytest.raises(NonNegativeDiagonal) as exc:
        gershgorin_sigma(Matrix.from_rows([[-1.0, 1.0], [1.0, 0.0]]))
    assert exc.value.index == 2


def test_lu_determinant_and_norm():
    m = Matrix.from_rows([[2.0, 1.0, 0.0], [0.0, 3.0, 4.0], [0.0, 0.0, -1.0]])
    assert_allclose(lu_determinant(m), -6.0)
    assert inf_norm(m) == 7.0


def test_parse_csv():
    m = parse_matrix_csv("-1, 2\n2,-1\n\n")
    assert m.entries == ((-1.0, 2.0), (2.0, -1.0))


@pytest.mark.parametrize("text, row, column", [
    ("-1,2\n2\n", 2, None),
    ("-1,2\n2,abc\n", 2, 2),
    ("-1,nan\n2,-1\n", 1, 2),
])
def test_parse_csv_errors_name_the_location(text, row, column):
    with pytest.raises(MatrixParseError) as exc:
        parse_matrix_csv(text)
    assert exc.value.row == row
    assert exc.value.column == column
    assert f"row {row}" in str(exc.value)


def test_parse_csv_rejects_non_square_and_empty():
    with pytest.raises(MatrixParseError):
        parse_matrix_csv("1,2,3\n4,5,6\n")
    with pytest.raises(MatrixParseError):
        parse_matrix_csv("\n\n")


def test_parse_json():
    m = parse_matrix_json('{"n": 2, "entries": [[-1, -2], [2, -1]]}')
    assert m.entries == ((-1.0, -2.0), (2.0, -1.0))


def test_parse_json_errors():
    with pytest.raises(MatrixParseError) as exc:
        parse_matrix_json('{"n": 2, "entries": [[-1, "x"], [2, -1]]}')
    assert (exc.value.row, exc.value.column) == (1, 2)
    with pytest.raises(MatrixParseError):
        parse_matrix_json('{"n": 2, "entries": [[-1, 2], [2]]}')
    with pytest.raises(MatrixParseError):
        parse_matrix_json('{"n": 2, "entries": ')


def test_json_round_trip_is_bit_exact():
    rng = np.random.default_rng(3)
    m = Matrix.from_array(rng.normal(size=(4, 4)) / 3.0)
    again = parse_matrix_json(dump_matrix_json(m))
    assert again.entries == m.entries


def test_load_matrix_by_extension(tmp_path):
    assert load_matrix(FIXTURES / "fixture_a.csv").entries == ((-1.0, 2.0), (2.0, -1.0))
    assert load_matrix(FIXTURES / "fixture_c.json").diagonal == (-1.0, -2.0, -3.0)

    other = tmp_path / "m.txt"
    other.write_text("-1\n")
    with pytest.raises(MatrixParseError):
        load_matrix(other)
    with pytest.raises(FileNotFoundError):
        load_matrix(tmp_path / "missing.csv")

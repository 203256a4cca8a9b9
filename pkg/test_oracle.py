from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from errors import DimensionTooLarge, InvalidEnsembleParameters, NoCrossingInRange
from matcore import Matrix, gershgorin_sigma, load_matrix
from oracle import (
    grid_scan_crossing,
    leibniz_charpoly_sigma,
    load_slack_fixture,
    random_integer_matrix,
    random_matrix,
    save_slack_fixture,
    search_strict_slack,
)
from sigmacharpoly import coefficient_polynomials
from stability import CrossingClass, check_theorem2, critical_sigma

A = Matrix.from_rows([[-1.0, 2.0], [2.0, -1.0]])
B = Matrix.from_rows([[-1.0, -2.0], [2.0, -1.0]])
C = Matrix.from_rows(np.diag([-1.0, -2.0, -3.0]))

SEARCHED_FIXTURE = Path(__file__).parent / "fixtures" / "corollary_strict_slack_search.json"
SLACK_SEARCH_N = 3
SLACK_SEEDS = range(300)


def test_leibniz_examples():
    assert leibniz_charpoly_sigma(A).coeffs == {
        (2, 0): Fraction(1), (1, 1): Fraction(2), (0, 2): Fraction(1), (0, 0): Fraction(-4),
    }
    assert leibniz_charpoly_sigma(Matrix.from_rows([[-3.0]])).coeffs == {
        (1, 0): Fraction(1), (0, 1): Fraction(3),
    }
    assert leibniz_charpoly_sigma(C).coeffs == {
        (3, 0): Fraction(1), (2, 1): Fraction(6), (1, 2): Fraction(11), (0, 3): Fraction(6),
    }


def test_leibniz_is_exact_for_binary_fractions():
    m = Matrix.from_rows([[-0.5, 0.25], [0.125, -1.5]])
    poly = leibniz_charpoly_sigma(m)
    assert poly.coefficient(0, 0) == Fraction(-1, 32)
    assert poly.coefficient(0, 2) == Fraction(3, 4)
    assert poly.coefficient(5, 5) == 0


def test_leibniz_dimension_limit():
    with pytest.raises(DimensionTooLarge) as exc:
        leibniz_charpoly_sigma(Matrix.from_array(-np.eye(7)))
    assert exc.value.n == 7


@pytest.mark.parametrize("seed", range(200))
def test_interpolated_coefficients_match_exact_expansion(seed):
    n = 1 + seed % 5
    m = random_integer_matrix(n, seed)
    exact = leibniz_charpoly_sigma(m).as_float_dict()
    interpolated = coefficient_polynomials(m).as_bivariate()
    for key in set(exact) | set(interpolated):
        assert abs(exact.get(key, 0.0) - interpolated.get(key, 0.0)) <= 1e-9, key


def test_grid_scan_examples():
    scan = grid_scan_crossing(A, 0.0, 4.0, 400)
    assert abs(scan.sigma_star - 2.0) <= 0.02
    assert scan.bracket[0] <= 2.0 <= scan.bracket[1]
    assert len(scan.sigmas) == len(scan.abscissae) == 400

    scan = grid_scan_crossing(B, -1.0, 1.0, 200)
    assert abs(scan.sigma_star) <= 0.02

    with pytest.raises(NoCrossingInRange):
        grid_scan_crossing(C, 1.0, 2.0, 10)


def test_grid_scan_arguments():
    with pytest.raises(ValueError):
        grid_scan_crossing(A, 0.0, 4.0, 1)
    with pytest.raises(ValueError):
        grid_scan_crossing(A, 4.0, 0.0, 10)


@pytest.mark.parametrize("seed", range(15))
def test_grid_scan_agrees_with_bisection(seed):
    m = random_matrix(2 + seed % 5, seed)
    critical = critical_sigma(m)
    scan = grid_scan_crossing(m, 0.0, gershgorin_sigma(m) + 1.0, 300)
    assert abs(scan.sigma_star - critical.sigma_star) <= 2.0 * scan.spacing


def test_random_matrix_properties():
    m = random_matrix(5, 3, diag_range=(-2.0, -1.0), offdiag_range=(0.5, 1.0))
    a = m.array
    assert np.all((np.diag(a) >= -2.0) & (np.diag(a) <= -1.0))
    off = a[~np.eye(5, dtype=bool)]
    assert np.all((off >= 0.5) & (off <= 1.0))


def test_random_matrix_examples():
    diag = random_matrix(3, 1, sparsity=1.0).array
    assert_array_equal(diag, np.diag(np.diag(diag)))
    single = random_matrix(1, 99)
    assert single.n == 1 and single.entries[0][0] < 0.0
    assert random_matrix(4, 42).entries == random_matrix(4, 42).entries
    assert random_matrix(4, 42).entries != random_matrix(4, 43).entries


@pytest.mark.parametrize("kwargs", [
    dict(n=0, seed=1),
    dict(n=3, seed=1, diag_range=(-1.0, 0.5)),
    dict(n=3, seed=1, diag_range=(-1.0, -2.0)),
    dict(n=3, seed=1, offdiag_range=(float("nan"), 1.0)),
    dict(n=3, seed=1, sparsity=1.5),
])
def test_random_matrix_rejects_invalid_parameters(kwargs):
    with pytest.raises(InvalidEnsembleParameters):
        random_matrix(**kwargs)


def test_random_integer_matrix():
    m = random_integer_matrix(5, 7)
    a = m.array
    assert np.all(a == np.round(a))
    assert np.all(np.diag(a) <= -1.0) and np.all(a >= -4.0) and np.all(a <= 4.0)
    with pytest.raises(InvalidEnsembleParameters):
        random_integer_matrix(3, 1, low=0)


def test_search_finds_strict_slack_case():
    case = search_strict_slack(SLACK_SEARCH_N, SLACK_SEEDS)
    assert case is not None
    assert case.slack > 1e-3
    assert critical_sigma(case.matrix).crossing == CrossingClass.COMPLEX_PAIR
    assert case.sigma_star - case.max_omega == pytest.approx(case.slack)


def test_searched_strict_slack_fixture():
    """The persisted search result is written on first run and checked against a fresh search"""
    case = search_strict_slack(SLACK_SEARCH_N, SLACK_SEEDS)
    assert case is not None
    if not SEARCHED_FIXTURE.exists():
        save_slack_fixture(case, SEARCHED_FIXTURE)
    fixture = load_slack_fixture(SEARCHED_FIXTURE)
    assert fixture.seed == case.seed
    assert fixture.entries == case.matrix.entries

    m = load_matrix(SEARCHED_FIXTURE)
    check = check_theorem2(m)
    assert check.crossing == CrossingClass.COMPLEX_PAIR
    assert check.corollary.holds
    assert check.corollary.slack > fixture.min_slack
    assert check.sigma_star == pytest.approx(fixture.sigma_star, abs=1e-9)
    assert check.max_omega == pytest.approx(fixture.max_omega, abs=1e-9)

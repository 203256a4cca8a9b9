import numpy as np
import pytest
from numpy.testing import assert_allclose

from eig import Spectrum, _hessenberg, eigenvalues, sigma_spectrum, spectral_abscissa
from matcore import Matrix
from oracle import random_matrix
from sigmacharpoly import charpoly_at
from upoly import RealPoly, companion_matrix

A = Matrix.from_rows([[-1.0, 2.0], [2.0, -1.0]])
B = Matrix.from_rows([[-1.0, -2.0], [2.0, -1.0]])


def test_diagonal_matrix():
    spectrum = eigenvalues(np.diag([-3.0, 1.0, -2.0]))
    assert_allclose([z.real for z in spectrum.eigenvalues], [-3.0, -2.0, 1.0])
    assert spectrum.abscissa == 1.0
    assert spectrum.real_crossing


def test_one_by_one():
    spectrum = eigenvalues(np.array([[-4.5]]))
    assert spectrum.eigenvalues == (complex(-4.5, 0.0),)
    assert spectrum.abscissa == -4.5


def test_rotation_block_is_a_complex_pair():
    spectrum = eigenvalues(np.array([[0.0, -2.0], [2.0, 0.0]]))
    assert_allclose(sorted(z.imag for z in spectrum.eigenvalues), [-2.0, 2.0], atol=1e-12)
    assert abs(spectrum.abscissa) <= 1e-12
    assert not spectrum.real_crossing
    assert len(spectrum.leading) == 2


def test_abscissa_examples():
    for sigma in (0.0, 1.0, 2.0, 3.5):
        assert_allclose(spectral_abscissa(A, sigma), 2.0 - sigma, atol=1e-12)
        assert_allclose(spectral_abscissa(B, sigma), -sigma, atol=1e-12)
    spectrum = sigma_spectrum(B, 0.5)
    assert not spectrum.real_crossing
    assert_allclose(sorted(z.imag for z in spectrum.leading), [-2.0, 2.0], atol=1e-9)


def test_hessenberg_form_and_similarity():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(7, 7))
    h = _hessenberg(a)
    assert np.all(np.tril(h, -2) == 0.0)
    assert_allclose(np.trace(h), np.trace(a), atol=1e-10)
    assert_allclose(np.linalg.det(h), np.linalg.det(a), rtol=1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_trace_and_determinant_identities(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 20
    a = rng.uniform(-5, 5, size=(n, n))
    values = np.array(eigenvalues(a).eigenvalues)
    assert abs(values.sum().real - np.trace(a)) <= 1e-8 * max(1.0, np.abs(a).sum())
    assert abs(values.sum().imag) <= 1e-8
    assert_allclose(np.prod(values).real, np.linalg.det(a), rtol=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_agrees_with_lapack(seed):
    rng = np.random.default_rng(50 + seed)
    n = 2 + seed
    a = rng.uniform(-5, 5, size=(n, n))
    ours = eigenvalues(a)
    theirs = np.linalg.eigvals(a)
    assert_allclose(ours.abscissa, theirs.real.max(), atol=1e-8)
    for z in theirs:
        assert min(abs(z - w) for w in ours.eigenvalues) <= 1e-7 * max(1.0, abs(z))


def test_complex_pairs_are_conjugate():
    rng = np.random.default_rng(9)
    values = eigenvalues(rng.normal(size=(9, 9))).eigenvalues
    imag = sorted(z.imag for z in values)
    assert_allclose(imag, [-v for v in reversed(imag)], atol=1e-9)


def test_balanced_companion_eigenvalues():
    p = RealPoly.from_roots([1.0, 2.0, 3.0, 4.0, 5.0])
    values = eigenvalues(companion_matrix(p), balance=True).eigenvalues
    assert_allclose(sorted(z.real for z in values), [1.0, 2.0, 3.0, 4.0, 5.0], atol=1e-8)
    assert max(abs(z.imag) for z in values) <= 1e-8


def test_leading_is_mixed():
    mixed = Spectrum(eigenvalues=(), abscissa=0.0, leading=(0j, 1j, -1j), real_crossing=True, im_tol=1e-7)
    assert mixed.leading_is_mixed
    pure = Spectrum(eigenvalues=(), abscissa=0.0, leading=(1j, -1j), real_crossing=False, im_tol=1e-7)
    assert not pure.leading_is_mixed


@pytest.mark.parametrize("seed", range(40))
def test_eigenvalues_zero_the_characteristic_polynomial(seed):
    m = random_matrix(2 + seed % 9, seed)
    sigma = float(np.random.default_rng(seed).uniform(-3.0, 3.0))
    coeffs = charpoly_at(m, sigma)
    for z in sigma_spectrum(m, sigma).eigenvalues:
        value = sum(c * z ** k for k, c in enumerate(coeffs))
        scale = sum(abs(c) * abs(z) ** k for k, c in enumerate(coeffs))
        assert abs(value) <= 1e-6 * scale, (seed, z)


@pytest.mark.parametrize("seed", range(40))
def test_abscissa_of_zero_diagonal_matrix_is_not_negative(seed):
    # M_0 has zero trace, so its eigenvalues cannot all lie in the left half-plane
    m = random_matrix(1 + seed % 10, seed, sparsity=0.3 * (seed % 3))
    assert spectral_abscissa(m, 0.0) >= -1e-9

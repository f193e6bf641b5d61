import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moebius.errors import InputError
from moebius.linalg import (
    SymmetricMatrix,
    TridiagonalSymmetric,
    eig_dense_symmetric,
    eig_tridiagonal,
    eig_tridiagonal_full,
)


def random_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    return (a + a.T) / 2


def test_diagonal_matrix():
    decomp = eig_dense_symmetric(np.diag([3.0, 1.0, 2.0]))
    assert decomp.eigenvalues == pytest.approx([1.0, 2.0, 3.0], abs=1e-15)


def test_two_by_two_swap():
    decomp = eig_dense_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert decomp.eigenvalues == pytest.approx([-1.0, 1.0], abs=1e-15)
    expected = 1.0 / np.sqrt(2.0)
    for k in range(2):
        v = decomp.eigenvectors[:, k]
        assert np.abs(v) == pytest.approx([expected, expected], abs=1e-15)
    # antisymmetric combination belongs to -1
    v = decomp.eigenvectors[:, 0]
    assert v[0] * v[1] < 0


def test_trace_identity():
    a = random_symmetric(20, seed=1)
    decomp = eig_dense_symmetric(a, want_vectors=False)
    assert decomp.eigenvalues.sum() == pytest.approx(np.trace(a), rel=1e-10)


def test_determinant_identity():
    a = random_symmetric(6, seed=2)
    decomp = eig_dense_symmetric(a, want_vectors=False)
    # LU-based determinant is an independent oracle
    assert np.prod(decomp.eigenvalues) == pytest.approx(np.linalg.det(a), rel=1e-9)


def test_against_lapack_and_residuals():
    a = random_symmetric(60, seed=3)
    decomp = eig_dense_symmetric(a)
    reference = np.linalg.eigvalsh(a)
    scale = np.max(np.abs(reference))
    assert np.max(np.abs(decomp.eigenvalues - reference)) < 1e-12 * scale

    v = decomp.eigenvectors
    assert np.max(np.abs(v.T @ v - np.eye(60))) < 1e-10
    norm_a = np.linalg.norm(a)
    residual = a @ v - v * decomp.eigenvalues[None, :]
    assert np.max(np.linalg.norm(residual, axis=0)) <= 1e-9 * norm_a
    reconstruction = v @ np.diag(decomp.eigenvalues) @ v.T
    assert np.linalg.norm(a - reconstruction) <= 1e-10 * norm_a


def test_permutation_similarity():
    a = random_symmetric(15, seed=4)
    rng = np.random.default_rng(5)
    perm = rng.permutation(15)
    permuted = a[np.ix_(perm, perm)]
    first = eig_dense_symmetric(a, want_vectors=False).eigenvalues
    second = eig_dense_symmetric(permuted, want_vectors=False).eigenvalues
    assert np.max(np.abs(first - second)) < 1e-11 * max(1.0, np.max(np.abs(first)))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=1, max_value=12), seed=st.integers(min_value=0, max_value=999))
def test_matches_lapack_small(n, seed):
    a = random_symmetric(n, seed)
    mine = eig_dense_symmetric(a, want_vectors=False).eigenvalues
    reference = np.linalg.eigvalsh(a)
    assert np.max(np.abs(mine - reference)) < 1e-11 * max(1.0, np.max(np.abs(reference)))


def test_symmetric_matrix_storage():
    dense = np.array([[2.0, -1.0], [-1.0, 5.0]])
    packed = SymmetricMatrix.from_dense(dense)
    assert packed.order == 2
    assert np.array_equal(packed.to_dense(), dense)
    with pytest.raises(InputError):
        SymmetricMatrix.from_dense(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InputError):
        SymmetricMatrix.from_dense(np.zeros((2, 3)))


def test_tridiagonal_decoupled():
    tri = TridiagonalSymmetric(np.array([0.0, 4.0, 16.0]), np.zeros(2))
    assert eig_tridiagonal(tri, 3) == pytest.approx([0.0, 4.0, 16.0], abs=1e-15)


def test_tridiagonal_discrete_laplacian():
    # classical closed form: eigenvalues 2 - 2 cos(k pi / (n+1))
    n = 34
    tri = TridiagonalSymmetric(np.full(n, 2.0), np.full(n - 1, -1.0))
    expected = 2.0 - 2.0 * np.cos(np.arange(1, n + 1) * np.pi / (n + 1))
    expected.sort()
    assert eig_tridiagonal(tri, n) == pytest.approx(expected, abs=1e-13)


def test_tridiagonal_matches_dense():
    rng = np.random.default_rng(7)
    tri = TridiagonalSymmetric(rng.standard_normal(40), rng.standard_normal(39))
    values = eig_tridiagonal(tri, 40)
    dense = eig_dense_symmetric(tri.to_dense(), want_vectors=False).eigenvalues
    assert np.max(np.abs(values - dense)) < 1e-12 * max(1.0, np.max(np.abs(dense)))


def test_tridiagonal_full_pairs():
    rng = np.random.default_rng(8)
    tri = TridiagonalSymmetric(rng.standard_normal(25), rng.standard_normal(24))
    decomp = eig_tridiagonal_full(tri)
    dense = tri.to_dense()
    v = decomp.eigenvectors
    assert np.max(np.abs(v.T @ v - np.eye(25))) < 1e-10
    residual = dense @ v - v * decomp.eigenvalues[None, :]
    assert np.max(np.abs(residual)) < 1e-9 * np.linalg.norm(dense)


def test_graded_matrix_small_eigenvalue_accuracy():
    # growing diagonal: QL must resolve the lowest eigenvalue to ~eps absolutely
    n = 64
    diag = (2.0 * np.arange(n)) ** 2
    off = np.full(n - 1, -0.25)
    off[0] *= np.sqrt(2.0)
    tri = TridiagonalSymmetric(diag, off)
    coarse = eig_tridiagonal(tri, 1)[0]
    fine = eig_tridiagonal(
        TridiagonalSymmetric(
            (2.0 * np.arange(2 * n)) ** 2,
            np.concatenate([off, np.full(n, -0.25)]),
        ),
        1,
    )[0]
    assert abs(coarse - fine) < 1e-14


def test_input_validation():
    with pytest.raises(InputError):
        TridiagonalSymmetric(np.array([1.0, 2.0]), np.array([np.inf]))
    tri = TridiagonalSymmetric(np.array([1.0, 2.0]), np.array([0.5]))
    with pytest.raises(InputError):
        eig_tridiagonal(tri, 3)
    with pytest.raises(InputError):
        eig_tridiagonal(tri, 0)

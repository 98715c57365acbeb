import numpy as np
import pytest

from symatch.core.gf2 import (
    BinaryMatrix,
    NoSolution,
    RowSpace,
    SingularMatrix,
    as_bits,
    inverse,
    kernel,
    rank,
    rref_with_transform,
    smith_normal_form,
    solve,
)


def _oracle_rank(array):
    """Plain Gaussian elimination without transcript."""
    work = np.array(array, dtype=np.uint8) & 1
    r = 0
    for col in range(work.shape[1]):
        rows = np.flatnonzero(work[r:, col])
        if rows.size == 0:
            continue
        pivot = r + rows[0]
        work[[r, pivot]] = work[[pivot, r]]
        for other in np.flatnonzero(work[:, col]):
            if other != r:
                work[other] ^= work[r]
        r += 1
        if r == work.shape[0]:
            break
    return r


def _random(rng, rows, cols, density=0.3):
    return (rng.random((rows, cols)) < density).astype(np.uint8)


def test_as_bits_reduces_mod_two():
    assert as_bits([0, 1, 2, 3]).tolist() == [0, 1, 0, 1]
    with pytest.raises(ValueError):
        as_bits([1, 0], length=3)


def test_packing_preserves_entries_across_words(rng):
    array = _random(rng, 5, 130)
    matrix = BinaryMatrix.from_array(array)
    assert matrix.shape == (5, 130)
    restored = BinaryMatrix(matrix.words.copy(), 5, 130)
    assert np.array_equal(restored.to_array(), array)


def test_matmul_matches_integer_product(rng):
    a = _random(rng, 7, 70)
    b = _random(rng, 70, 9)
    product = BinaryMatrix.from_array(a) @ BinaryMatrix.from_array(b)
    assert np.array_equal(product.to_array(), (a.astype(int) @ b) & 1)


def test_transpose_and_dot(rng):
    a = _random(rng, 6, 11)
    matrix = BinaryMatrix.from_array(a)
    assert np.array_equal(matrix.T.to_array(), a.T)
    v = _random(rng, 1, 11)[0]
    assert np.array_equal(matrix.dot(v), (a.astype(int) @ v) & 1)


def test_rref_transform_reproduces_reduced_form(rng):
    a = _random(rng, 12, 20)
    reduction = rref_with_transform(BinaryMatrix.from_array(a))
    assert reduction.transform @ BinaryMatrix.from_array(a) == reduction.reduced
    reduced = reduction.reduced.to_array()
    for row, col in enumerate(reduction.pivots):
        assert reduced[:, col].tolist() == [1 if r == row else 0 for r in range(12)]
    assert not reduced[reduction.rank:].any()


@pytest.mark.parametrize("shape", [(8, 8), (10, 25), (30, 12), (1, 1)])
def test_rank_agrees_with_oracle(rng, shape):
    for _ in range(5):
        a = _random(rng, *shape)
        assert rank(BinaryMatrix.from_array(a)) == _oracle_rank(a)


def test_rank_of_zero_and_identity():
    assert rank(BinaryMatrix.zeros(4, 6)) == 0
    assert rank(BinaryMatrix.identity(9)) == 9


def test_kernel_is_complete_and_annihilated(rng):
    a = _random(rng, 9, 16)
    matrix = BinaryMatrix.from_array(a)
    basis = kernel(matrix)
    assert basis.rows == 16 - rank(matrix)
    assert not ((a.astype(int) @ basis.to_array().T) & 1).any()
    assert rank(basis) == basis.rows


def test_kernel_of_full_rank_square_is_empty():
    assert kernel(BinaryMatrix.identity(5)).shape == (0, 5)


def test_solve_finds_particular_solution(rng):
    a = _random(rng, 10, 14)
    x = _random(rng, 1, 14)[0]
    b = (a.astype(int) @ x) & 1
    found = solve(BinaryMatrix.from_array(a), b)
    assert np.array_equal((a.astype(int) @ found) & 1, b)


def test_solve_rejects_inconsistent_system():
    a = BinaryMatrix.from_array([[1, 1], [1, 1]])
    with pytest.raises(NoSolution):
        solve(a, [1, 0])


def test_inverse_and_singular():
    a = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 1]], dtype=np.uint8)
    inv = inverse(BinaryMatrix.from_array(a))
    assert (BinaryMatrix.from_array(a) @ inv) == BinaryMatrix.identity(3)
    with pytest.raises(SingularMatrix):
        inverse(BinaryMatrix.from_array([[1, 1], [1, 1]]))
    with pytest.raises(ValueError):
        inverse(BinaryMatrix.zeros(2, 3))


@pytest.mark.parametrize("shape", [(6, 6), (5, 9), (11, 4)])
def test_smith_normal_form_factorisation(rng, shape):
    a = _random(rng, *shape, density=0.4)
    matrix = BinaryMatrix.from_array(a)
    U, D, W = smith_normal_form(matrix)
    assert (U @ D @ W) == matrix
    d = D.to_array()
    r = rank(matrix)
    expected = np.zeros(shape, dtype=np.uint8)
    expected[np.arange(r), np.arange(r)] = 1
    assert np.array_equal(d, expected)
    assert rank(U) == shape[0] and rank(W) == shape[1]


def test_row_space_membership():
    space = RowSpace(4)
    assert space.add([1, 1, 0, 0])
    assert space.add([0, 1, 1, 0])
    assert not space.add([1, 0, 1, 0])
    assert space.contains([1, 0, 1, 0])
    assert not space.contains([0, 0, 0, 1])
    assert space.dimension == 2

    clone = space.copy()
    clone.add([0, 0, 0, 1])
    assert clone.dimension == 3 and space.dimension == 2


def test_row_space_from_matrix_matches_incremental(rng):
    a = _random(rng, 8, 12)
    built = RowSpace.from_matrix(BinaryMatrix.from_array(a))
    assert built.dimension == _oracle_rank(a)
    for row in a:
        assert built.contains(row)

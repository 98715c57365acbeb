"""
GF(2) Linear Algebra
Bit-packed binary matrices with row reduction, kernels, solves and Smith form
"""

import logging
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import SymatchError

logger = logging.getLogger(__name__)

WORD_BITS = 64
_ONE = np.uint64(1)


class GF2Error(SymatchError):
    """Exception raised by GF(2) linear algebra"""
    pass


class NoSolution(GF2Error):
    """Raised when a right-hand side lies outside the column space"""
    pass


class SingularMatrix(GF2Error):
    """Raised when an inverse is requested for a rank-deficient matrix"""
    pass


def as_bits(vector, length: Optional[int] = None) -> np.ndarray:
    """
    Coerce a vector to a uint8 array of zeros and ones.

    Args:
        vector: Any array-like of integers
        length: Expected length, checked when given

    Returns:
        1-D uint8 array reduced modulo 2

    Raises:
        ValueError: If the length does not match
    """
    bits = np.asarray(vector, dtype=np.int64).ravel() & 1
    if length is not None and bits.shape[0] != length:
        raise ValueError(f"Expected a vector of length {length}, got {bits.shape[0]}")
    return bits.astype(np.uint8)


class BinaryMatrix:
    """
    Dense binary matrix stored as little-endian 64-bit words per row.

    Instances are treated as immutable; every operation returns a new matrix.
    """

    def __init__(self, words: np.ndarray, rows: int, cols: int):
        self._words = words
        self.rows = rows
        self.cols = cols
        self._dense: Optional[np.ndarray] = None

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_array(cls, array) -> 'BinaryMatrix':
        dense = np.atleast_2d(np.asarray(array, dtype=np.int64) & 1).astype(np.uint8)
        rows, cols = dense.shape
        n_words = max(1, -(-cols // WORD_BITS))
        packed = np.packbits(dense, axis=1, bitorder='little')
        padded = np.zeros((rows, n_words * 8), dtype=np.uint8)
        padded[:, :packed.shape[1]] = packed
        words = padded.view('<u8').astype(np.uint64)
        matrix = cls(words, rows, cols)
        matrix._dense = dense
        return matrix

    @classmethod
    def from_rows(cls, vectors: Sequence, cols: int) -> 'BinaryMatrix':
        if len(vectors) == 0:
            return cls.zeros(0, cols)
        return cls.from_array(np.vstack([as_bits(v, cols) for v in vectors]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'BinaryMatrix':
        return cls.from_array(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> 'BinaryMatrix':
        return cls.from_array(np.eye(n, dtype=np.uint8))

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        """Unpacked uint8 entries, cached after the first call."""
        if self._dense is None and self.rows == 0:
            self._dense = np.zeros((0, self.cols), dtype=np.uint8)
        if self._dense is None:
            as_bytes = np.ascontiguousarray(self._words.astype('<u8')).view(np.uint8)
            as_bytes = as_bytes.reshape(self.rows, -1)
            self._dense = np.unpackbits(
                as_bytes, axis=1, bitorder='little'
            )[:, :self.cols].astype(np.uint8)
        return self._dense

    def row(self, index: int) -> np.ndarray:
        return self.to_array()[index].copy()

    def __iter__(self):
        for index in range(self.rows):
            yield self.row(index)

    def __len__(self) -> int:
        return self.rows

    @property
    def T(self) -> 'BinaryMatrix':
        return BinaryMatrix.from_array(self.to_array().T)

    def __matmul__(self, other: 'BinaryMatrix') -> 'BinaryMatrix':
        if self.cols != other.rows:
            raise ValueError(f"Cannot multiply {self.shape} by {other.shape}")
        # uint8 accumulation wraps modulo 256, which keeps the parity
        return BinaryMatrix.from_array((self.to_array() @ other.to_array()) & 1)

    def dot(self, vector) -> np.ndarray:
        """Matrix-vector product over GF(2)."""
        bits = as_bits(vector, self.cols)
        return ((self.to_array() @ bits) & 1).astype(np.uint8)

    def vstack(self, other: 'BinaryMatrix') -> 'BinaryMatrix':
        if self.cols != other.cols:
            raise ValueError("Column counts differ")
        return BinaryMatrix.from_array(np.vstack([self.to_array(), other.to_array()]))

    def select_rows(self, indices: Iterable[int]) -> 'BinaryMatrix':
        return BinaryMatrix.from_array(self.to_array()[list(indices)])

    def is_zero(self) -> bool:
        return not self._words.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.to_array(), other.to_array())

    def __hash__(self):
        return hash((self.rows, self.cols, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols})"


class RowReduction(NamedTuple):
    """Outcome of rref_with_transform: reduced = transform @ matrix."""
    reduced: BinaryMatrix
    transform: BinaryMatrix
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _column_bits(words: np.ndarray, col: int) -> np.ndarray:
    return (words[:, col >> 6] >> np.uint64(col & 63)) & _ONE


def rref_with_transform(matrix: BinaryMatrix) -> RowReduction:
    """
    Reduce a matrix to reduced row-echelon form, recording the row operations.

    Pivots are taken as the first nonzero entry scanning columns left to
    right and rows top-down, so results are reproducible.

    Args:
        matrix: Matrix to reduce

    Returns:
        RowReduction with reduced = transform @ matrix and the pivot columns
    """
    rows, cols = matrix.shape
    reduced = matrix.words.copy()
    transform = BinaryMatrix.identity(rows).words.copy()
    pivots: List[int] = []

    pivot_row = 0
    for col in range(cols):
        if pivot_row == rows:
            break
        candidates = np.flatnonzero(_column_bits(reduced[pivot_row:], col))
        if candidates.size == 0:
            continue
        source = pivot_row + int(candidates[0])
        if source != pivot_row:
            reduced[[pivot_row, source]] = reduced[[source, pivot_row]]
            transform[[pivot_row, source]] = transform[[source, pivot_row]]

        hits = np.flatnonzero(_column_bits(reduced, col))
        hits = hits[hits != pivot_row]
        if hits.size:
            reduced[hits] ^= reduced[pivot_row]
            transform[hits] ^= transform[pivot_row]

        pivots.append(col)
        pivot_row += 1

    return RowReduction(
        reduced=BinaryMatrix(reduced, rows, cols),
        transform=BinaryMatrix(transform, rows, rows),
        pivots=tuple(pivots),
    )


def rank(matrix: BinaryMatrix) -> int:
    return rref_with_transform(matrix).rank


def kernel(matrix: BinaryMatrix, reduction: Optional[RowReduction] = None) -> BinaryMatrix:
    """
    Basis of the right null space.

    Args:
        matrix: Matrix M
        reduction: Precomputed reduction of M, if available

    Returns:
        BinaryMatrix whose rows v satisfy M v = 0; cols - rank(M) rows
    """
    reduction = reduction or rref_with_transform(matrix)
    pivots = list(reduction.pivots)
    pivot_set = set(pivots)
    free = [c for c in range(matrix.cols) if c not in pivot_set]

    basis = np.zeros((len(free), matrix.cols), dtype=np.uint8)
    if free:
        basis[np.arange(len(free)), free] = 1
        if pivots:
            reduced = reduction.reduced.to_array()
            basis[:, pivots] = reduced[:len(pivots)][:, free].T
    return BinaryMatrix.from_array(basis) if free else BinaryMatrix.zeros(0, matrix.cols)


def solve(matrix: BinaryMatrix, rhs, reduction: Optional[RowReduction] = None) -> np.ndarray:
    """
    Find one x with M x = b.

    Args:
        matrix: Matrix M
        rhs: Right-hand side b of length M.rows
        reduction: Precomputed reduction of M; per-shot callers pass it in

    Returns:
        A particular solution x

    Raises:
        NoSolution: If b is not in the column space of M
    """
    b = as_bits(rhs, matrix.rows)
    reduction = reduction or rref_with_transform(matrix)
    transformed = reduction.transform.dot(b)
    if transformed[reduction.rank:].any():
        raise NoSolution("Right-hand side is outside the column space")

    x = np.zeros(matrix.cols, dtype=np.uint8)
    if reduction.rank:
        x[list(reduction.pivots)] = transformed[:reduction.rank]
    return x


def inverse(matrix: BinaryMatrix) -> BinaryMatrix:
    """Inverse of a square matrix, raising SingularMatrix when rank-deficient."""
    if matrix.rows != matrix.cols:
        raise ValueError(f"Inverse needs a square matrix, got {matrix.shape}")
    reduction = rref_with_transform(matrix)
    if reduction.rank < matrix.rows:
        raise SingularMatrix(f"Matrix of size {matrix.rows} has rank {reduction.rank}")
    return reduction.transform


def smith_normal_form(matrix: BinaryMatrix) -> Tuple[BinaryMatrix, BinaryMatrix, BinaryMatrix]:
    """
    Binary Smith normal form M = U D W.

    Row reduction gives G M = R; reducing R^T gives T R^T = D^T, so
    G M T^T = D and therefore U = G^-1, W = (T^T)^-1.

    Returns:
        (U, D, W) with U, W invertible and D an identity block of size
        rank(M) padded with zeros
    """
    rows_step = rref_with_transform(matrix)
    cols_step = rref_with_transform(rows_step.reduced.T)

    column_ops = cols_step.transform.T
    diagonal = rows_step.reduced @ column_ops
    left = inverse(rows_step.transform)
    right = inverse(column_ops)
    return left, diagonal, right


class RowSpace:
    """
    Incrementally built row space supporting membership tests.

    Rows are kept in echelon order of insertion; reducing a vector walks the
    stored rows once.
    """

    def __init__(self, cols: int, rows: Optional[Iterable] = None):
        self.cols = cols
        self._pivots: List[int] = []
        self._rows: List[np.ndarray] = []
        for row in rows if rows is not None else []:
            self.add(row)

    @classmethod
    def from_matrix(cls, matrix: BinaryMatrix) -> 'RowSpace':
        space = cls(matrix.cols)
        reduction = rref_with_transform(matrix)
        reduced = reduction.reduced.to_array()
        for index, pivot in enumerate(reduction.pivots):
            space._pivots.append(pivot)
            space._rows.append(reduced[index].copy())
        return space

    @property
    def dimension(self) -> int:
        return len(self._rows)

    def reduce(self, vector) -> np.ndarray:
        remainder = as_bits(vector, self.cols).copy()
        for pivot, row in zip(self._pivots, self._rows):
            if remainder[pivot]:
                remainder ^= row
        return remainder

    def contains(self, vector) -> bool:
        return not self.reduce(vector).any()

    def add(self, vector) -> bool:
        """Add a vector; return True if it enlarged the space."""
        remainder = self.reduce(vector)
        nonzero = np.flatnonzero(remainder)
        if nonzero.size == 0:
            return False
        self._pivots.append(int(nonzero[0]))
        self._rows.append(remainder)
        return True

    def copy(self) -> 'RowSpace':
        clone = RowSpace(self.cols)
        clone._pivots = list(self._pivots)
        clone._rows = [row.copy() for row in self._rows]
        return clone

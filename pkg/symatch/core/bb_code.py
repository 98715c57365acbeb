"""
Bivariate Bicycle Codes
Check matrices, syndromes, destabilizer corrections and logical operators

Qubits are laid out as the L block [0, MN) followed by the R block
[MN, 2MN). The Z-check at site s acts on L qubits s*a for every term a of A
and on R qubits s*b for every term b of B, giving H_Z = [A | B] and
H_X = [B^T | A^T].
"""

import logging
from itertools import combinations
from math import comb
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .errors import SymatchError
from .gf2 import (
    BinaryMatrix,
    RowSpace,
    as_bits,
    inverse,
    kernel,
    rref_with_transform,
    solve,
)
from .lattice import Exponent, LatticePoly, PauliVec, TorusShape

logger = logging.getLogger(__name__)


class CodeError(SymatchError):
    """Exception raised while building or using a BB code"""
    pass


class CommutationFailure(CodeError):
    """Raised when H_X H_Z^T is nonzero for a polynomial pair"""
    pass


class SyndromeMismatch(CodeError):
    """Raised when a correction does not reproduce the error's syndrome"""
    pass


class LogicalBasis(NamedTuple):
    """Rows of z and x are paired: z_i . x_j = delta_ij."""
    z: BinaryMatrix
    x: BinaryMatrix

    def z_paulis(self, shape: TorusShape) -> List[PauliVec]:
        return [PauliVec.from_vector(shape, row) for row in self.z]

    def x_paulis(self, shape: TorusShape) -> List[PauliVec]:
        return [PauliVec.from_vector(shape, row) for row in self.x]


class LogicalFailure(NamedTuple):
    flags: np.ndarray
    failed: bool


class BBCode:
    """
    A bivariate bicycle code built from two commuting polynomials.

    The object is immutable after construction and safe to share between
    decoding workers.
    """

    def __init__(
        self,
        A: LatticePoly,
        B: LatticePoly,
        name: Optional[str] = None,
        distance: Optional[int] = None,
        distance_caveat: Optional[str] = None,
        planar_a: Optional[Sequence[Exponent]] = None,
        planar_b: Optional[Sequence[Exponent]] = None,
    ):
        if A.shape != B.shape:
            raise CodeError(f"A lives on ({A.shape}) but B on ({B.shape})")

        self.logger = logging.getLogger(__name__)
        self.shape = A.shape
        self.A = A
        self.B = B
        self.name = name or f"BB[{A} | {B}; {A.shape}]"
        self.distance = distance
        self.distance_caveat = distance_caveat
        self.planar_a = list(planar_a) if planar_a is not None else A.planar_terms()
        self.planar_b = list(planar_b) if planar_b is not None else B.planar_terms()

        a_block = A.check_block()
        b_block = B.check_block()
        self._hz_dense = np.hstack([a_block, b_block])
        self._hx_dense = np.hstack([b_block.T, a_block.T])
        self.hz = BinaryMatrix.from_array(self._hz_dense)
        self.hx = BinaryMatrix.from_array(self._hx_dense)

        if ((self._hx_dense @ self._hz_dense.T) & 1).any():
            raise CommutationFailure(f"H_X H_Z^T != 0 for {self.name}")

        self.hz_reduction = rref_with_transform(self.hz)
        self.hx_reduction = rref_with_transform(self.hx)
        self.k = self.n - self.hz_reduction.rank - self.hx_reduction.rank
        self._logicals: Optional[LogicalBasis] = None

        self.logger.debug(f"Built {self.name}: n={self.n}, k={self.k}")

    @property
    def n(self) -> int:
        return 2 * self.shape.sites

    @property
    def sites(self) -> int:
        return self.shape.sites

    @property
    def symmetry_count(self) -> int:
        """Independent Z-check symmetries, MN - rank(H_Z)."""
        return self.sites - self.hz_reduction.rank

    @property
    def hz_dense(self) -> np.ndarray:
        return self._hz_dense

    @property
    def hx_dense(self) -> np.ndarray:
        return self._hx_dense

    def syndrome(self, error) -> np.ndarray:
        bits = as_bits(error, self.n)
        # uint8 accumulation wraps modulo 256, which keeps the parity
        return (self._hz_dense @ bits) & 1

    def initial_correction(self, syndrome) -> np.ndarray:
        return solve(self.hz, syndrome, reduction=self.hz_reduction)

    def logical_basis(self) -> LogicalBasis:
        if self._logicals is None:
            self._logicals = self._compute_logicals()
        return self._logicals

    def _compute_logicals(self) -> LogicalBasis:
        z_reps = _quotient_representatives(kernel(self.hx), self.hz)
        x_reps = _quotient_representatives(kernel(self.hz), self.hx)
        if len(z_reps) != self.k or len(x_reps) != self.k:
            raise CodeError(
                f"Found {len(z_reps)} Z and {len(x_reps)} X logicals, expected {self.k}"
            )
        if self.k == 0:
            empty = BinaryMatrix.zeros(0, self.n)
            return LogicalBasis(z=empty, x=empty)

        z = BinaryMatrix.from_rows(z_reps, self.n)
        x = BinaryMatrix.from_rows(x_reps, self.n)
        gram = x @ z.T
        x = inverse(gram) @ x
        return LogicalBasis(z=z, x=x)

    def is_logical_failure(self, error, correction) -> LogicalFailure:
        residual = as_bits(error, self.n) ^ as_bits(correction, self.n)
        if self.syndrome(residual).any():
            raise SyndromeMismatch("Correction does not match the error syndrome")
        flags = self.logical_basis().z.dot(residual)
        return LogicalFailure(flags=flags, failed=bool(flags.any()))

    def qubit_site(self, qubit: int) -> Exponent:
        return self.shape.coords(qubit % self.sites)

    def describe(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "n": self.n,
            "k": self.k,
            "d": self.distance,
            "shape": [self.shape.M, self.shape.N, self.shape.alpha],
            "A": str(self.A),
            "B": str(self.B),
        }

    def __repr__(self) -> str:
        return f"BBCode({self.name}, [[{self.n},{self.k},{self.distance}]])"


def _quotient_representatives(candidates: BinaryMatrix, stabilizers: BinaryMatrix) -> List[np.ndarray]:
    space = RowSpace.from_matrix(stabilizers)
    representatives = []
    for vector in candidates:
        if space.add(vector):
            representatives.append(vector)
    return representatives


def build_code(A: LatticePoly, B: LatticePoly, shape: Optional[TorusShape] = None, **kwargs) -> BBCode:
    """
    Build a BB code, verifying that its checks commute.

    Args:
        A, B: Canonical polynomials on the same torus
        shape: Optional torus, checked against the polynomials

    Returns:
        BBCode instance

    Raises:
        CommutationFailure: If H_X H_Z^T != 0
    """
    if shape is not None and (A.shape != shape or B.shape != shape):
        raise CodeError(f"Polynomials are not defined on ({shape})")
    return BBCode(A, B, **kwargs)


def syndrome(code: BBCode, error) -> np.ndarray:
    return code.syndrome(error)


def initial_correction(code: BBCode, syndrome_bits) -> np.ndarray:
    return code.initial_correction(syndrome_bits)


def logical_basis(code: BBCode) -> LogicalBasis:
    return code.logical_basis()


def is_logical_failure(code: BBCode, error, correction) -> LogicalFailure:
    return code.is_logical_failure(error, correction)


def _packed_columns(matrix: np.ndarray) -> np.ndarray:
    packed = np.packbits(matrix.T, axis=1, bitorder='little')
    width = -(-packed.shape[1] // 8) * 8
    padded = np.zeros((packed.shape[0], width), dtype=np.uint8)
    padded[:, :packed.shape[1]] = packed
    return padded.view('<u8')


def brute_force_distance(code: BBCode, cap: int, budget: int = 2_000_000) -> Optional[int]:
    """
    Minimum weight of a Z-logical, searched up to a weight cap.

    Translations preserve weight, so a minimum-weight logical can be moved
    to contain qubit L0 or R0. Weight-w candidates are found by joining
    half-weight sets on equal H_X syndromes.

    Args:
        code: Code to analyse
        cap: Largest weight searched
        budget: Largest half-set enumeration attempted

    Returns:
        The distance, or None when it exceeds the cap or the budget
    """
    n = code.n
    column_syndromes = _packed_columns(code.hx_dense)
    x_logicals = code.logical_basis().x.to_array()
    column_logicals = _packed_columns(x_logicals) if code.k else np.zeros((n, 1), dtype=np.uint64)
    anchors = [0, code.sites]

    for weight in range(1, cap + 1):
        left_size = (weight + 1) // 2
        right_size = weight - left_size
        if comb(n, right_size) > budget:
            logger.warning(f"Distance search for {code.name} stopped at weight {weight}: budget exceeded")
            return None

        right_index: Dict[bytes, List[int]] = {}
        if right_size:
            right_sets = np.fromiter(
                (q for subset in combinations(range(n), right_size) for q in subset),
                dtype=np.int32,
            ).reshape(-1, right_size)
            right_syn = np.bitwise_xor.reduce(column_syndromes[right_sets], axis=1)
            right_log = np.bitwise_xor.reduce(column_logicals[right_sets], axis=1)
            for row, key in enumerate(right_syn):
                right_index.setdefault(key.tobytes(), []).append(row)
        else:
            right_sets = np.zeros((1, 0), dtype=np.int32)
            right_log = np.zeros((1, column_logicals.shape[1]), dtype=np.uint64)
            right_index[np.zeros(column_syndromes.shape[1], dtype=np.uint64).tobytes()] = [0]

        for anchor in anchors:
            others = [q for q in range(n) if q != anchor]
            for rest in combinations(others, left_size - 1):
                left = (anchor,) + rest
                left_syn = np.bitwise_xor.reduce(column_syndromes[list(left)], axis=0)
                matches = right_index.get(left_syn.tobytes())
                if not matches:
                    continue
                left_log = np.bitwise_xor.reduce(column_logicals[list(left)], axis=0)
                left_set = set(left)
                for row in matches:
                    if left_set.intersection(right_sets[row].tolist()):
                        continue
                    if (left_log ^ right_log[row]).any():
                        logger.info(f"Distance of {code.name} is {weight}")
                        return weight
    return None

"""
Simplex Outer Code
Consistency checks and decoding of the 2^K - 1 commutator bits per direction

Matching all nonzero combinations v of K generator symmetries yields bits
b[v]. Without matching failures b[v] = sum_j v_j b[e_j], so the word is a
codeword of the [2^K - 1, K] simplex code and disagreements can be fixed.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Mapping, Tuple

import numpy as np

logger = logging.getLogger(__name__)


def _popcount(value: int) -> int:
    return bin(value).count('1')


@lru_cache(maxsize=None)
def codeword_table(K: int) -> np.ndarray:
    """Row g is the codeword of generator bits g: c[v] = parity(v & g); column 0 is unused."""
    selectors = np.arange(1 << K)
    table = np.zeros((1 << K, 1 << K), dtype=np.uint8)
    for g in range(1 << K):
        table[g] = [_popcount(int(v) & g) & 1 for v in selectors]
    table[:, 0] = 0
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def check_supports(K: int) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """
    Checks C[c] for every subset c with |c| <= K - 2, heaviest first.

    C[c] is the parity of b over V[c] = {v != 0 : v contains c}. There are
    2^K - K - 1 of them and they vanish exactly on codewords.
    """
    checks = []
    for c in sorted(range(1 << K), key=lambda c: (-_popcount(c), c)):
        if _popcount(c) > K - 2:
            continue
        members = tuple(v for v in range(1, 1 << K) if v & c == c)
        checks.append((c, members))
    return tuple(checks)


@dataclass
class SimplexWord:
    """Commutator bits b[v] indexed by the selector integer v (b[0] is unused)."""

    K: int
    bits: np.ndarray

    def __post_init__(self):
        self.bits = np.asarray(self.bits, dtype=np.uint8).copy()
        if self.bits.shape != (1 << self.K,):
            raise ValueError(f"A K={self.K} word needs {1 << self.K} entries, got {self.bits.shape}")
        self.bits[0] = 0

    @classmethod
    def from_mapping(cls, K: int, values: Mapping[int, int]) -> 'SimplexWord':
        bits = np.zeros(1 << K, dtype=np.uint8)
        for selector, bit in values.items():
            bits[selector] = bit & 1
        return cls(K, bits)

    @classmethod
    def from_generator_bits(cls, generator_bits) -> 'SimplexWord':
        bits = [int(b) & 1 for b in generator_bits]
        K = len(bits)
        g = sum(bit << j for j, bit in enumerate(bits))
        return cls(K, codeword_table(K)[g])

    @property
    def length(self) -> int:
        return (1 << self.K) - 1

    @property
    def generator_bits(self) -> np.ndarray:
        return np.array([self.bits[1 << j] for j in range(self.K)], dtype=np.uint8)

    def check_values(self) -> List[Tuple[int, int]]:
        return [(c, int(self.bits[list(members)].sum() & 1)) for c, members in check_supports(self.K)]

    def is_codeword(self) -> bool:
        return all(value == 0 for _, value in self.check_values())


def _lexicographic_key(g: int, K: int) -> Tuple[int, ...]:
    return tuple(g >> j & 1 for j in range(K))


def simplex_outer_decode(word: SimplexWord) -> np.ndarray:
    """
    Correct a word to its nearest simplex codeword.

    The correction a is built greedily from the heaviest violated checks
    down to weight-1 checks, then the all-ones word fixes C[0]. Toggling
    the generator codewords spans every codeword, and the candidate closest
    to the raw word wins, ties going to the lexicographically smallest
    generator bits.

    Returns:
        Corrected generator bits b[e_1..e_K]
    """
    K = word.K
    if K == 0:
        return np.zeros(0, dtype=np.uint8)

    correction = np.zeros(1 << K, dtype=np.uint8)
    checks = check_supports(K)
    for c, members in checks:
        if c == 0:
            continue
        if (word.bits[list(members)] ^ correction[list(members)]).sum() & 1:
            correction[c] ^= 1

    # K = 1 has no checks at all; otherwise the last one is C[0]
    if checks:
        _, root_members = checks[-1]
        if (word.bits[list(root_members)] ^ correction[list(root_members)]).sum() & 1:
            correction[1:] ^= 1

    corrected = word.bits ^ correction
    table = codeword_table(K)
    toggled = corrected[None, :] ^ table
    distances = (toggled[:, 1:] ^ word.bits[None, 1:]).sum(axis=1)

    best = min(
        range(1 << K),
        key=lambda t: (int(distances[t]), _lexicographic_key(_generator_index(toggled[t], K), K)),
    )
    candidate = toggled[best]
    if logger.isEnabledFor(logging.DEBUG) and distances[best]:
        logger.debug(f"Simplex decode fixed {int(distances[best])} of {word.length} bits")
    return np.array([candidate[1 << j] for j in range(K)], dtype=np.uint8)


def _generator_index(bits: np.ndarray, K: int) -> int:
    return sum(int(bits[1 << j]) << j for j in range(K))


def brute_force_nearest_codeword(word: SimplexWord) -> np.ndarray:
    """Nearest codeword by scanning all 2^K, with the same tie-break."""
    K = word.K
    table = codeword_table(K)
    distances = (table[:, 1:] ^ word.bits[None, 1:]).sum(axis=1)
    best = min(range(1 << K), key=lambda g: (int(distances[g]), _lexicographic_key(g, K)))
    return np.array([best >> j & 1 for j in range(K)], dtype=np.uint8)

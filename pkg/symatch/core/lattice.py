"""
Lattice Polynomials
Bivariate Laurent polynomials over GF(2) on a (possibly twisted) torus

Sites are indexed row-major in x: idx(j, k) = k * M + j. A twisted torus
obeys x^M = 1 and x^alpha y^N = 1, so wrapping in y shifts x by -alpha.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterable, List, Sequence, Tuple, Union

import numpy as np

from .errors import SymatchError
from .gf2 import as_bits

logger = logging.getLogger(__name__)

Exponent = Tuple[int, int]


class LatticeError(SymatchError):
    """Exception raised for lattice polynomial operations"""
    pass


class ShapeMismatch(LatticeError):
    """Raised when two polynomials live on different tori"""
    pass


class PolynomialSyntaxError(LatticeError):
    """Raised when polynomial text cannot be parsed"""
    pass


@dataclass(frozen=True)
class TorusShape:
    """Periods (M, N) and twist alpha of a torus with x^M = x^alpha y^N = 1."""

    M: int
    N: int
    alpha: int = 0

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ValueError(f"Torus periods must be positive, got ({self.M}, {self.N})")
        if not 0 <= self.alpha < self.M:
            raise ValueError(f"Twist must satisfy 0 <= alpha < M, got {self.alpha}")

    @property
    def sites(self) -> int:
        return self.M * self.N

    def canonicalize(self, j: int, k: int) -> Exponent:
        wraps = k // self.N
        return ((j - self.alpha * wraps) % self.M, k - wraps * self.N)

    def index(self, j: int, k: int) -> int:
        cj, ck = self.canonicalize(j, k)
        return ck * self.M + cj

    def coords(self, index: int) -> Exponent:
        return (index % self.M, index // self.M)

    def doubled(self, axis: str) -> 'TorusShape':
        """
        Index-2 cover of this torus along one axis.

        Doubling y keeps the cover consistent with the twist: the relation
        becomes x^(2 alpha) y^(2N) = 1.
        """
        if axis == 'x':
            return TorusShape(2 * self.M, self.N, self.alpha)
        if axis == 'y':
            return TorusShape(self.M, 2 * self.N, (2 * self.alpha) % self.M)
        raise ValueError(f"Axis must be 'x' or 'y', got {axis!r}")

    def __str__(self) -> str:
        return f"{self.M},{self.N},{self.alpha}"


@lru_cache(maxsize=None)
def site_grid(shape: TorusShape) -> Tuple[np.ndarray, np.ndarray]:
    """x and y coordinates of every site index."""
    indices = np.arange(shape.sites)
    return indices % shape.M, indices // shape.M


@lru_cache(maxsize=None)
def translation_permutation(shape: TorusShape, dj: int, dk: int) -> np.ndarray:
    """perm[t] is the index of site t translated by x^dj y^dk."""
    xs, ys = site_grid(shape)
    kk = ys + dk
    wraps = np.floor_divide(kk, shape.N)
    jj = np.mod(xs + dj - shape.alpha * wraps, shape.M)
    perm = (kk - wraps * shape.N) * shape.M + jj
    perm.setflags(write=False)
    return perm


def centered(value: int, period: int) -> int:
    reduced = value % period
    return reduced - period if reduced > period // 2 else reduced


# ----------------------------------------------------------------------
# Text syntax
# ----------------------------------------------------------------------

_FACTOR = re.compile(r'([xy])(?:\^\{?(-?\d+)\}?)?')
_MONOMIAL = re.compile(r'^(?:1|(?:[xy](?:\^\{?-?\d+\}?)?\*?)+)$')


def parse_exponents(text: str) -> List[Exponent]:
    """
    Parse polynomial text into signed exponent pairs, before any reduction.

    Accepts terms joined by '+', monomials such as 'x^-1*y^3', 'y^{-1}x^3'
    or '1'. The literal '0' is the zero polynomial.

    Raises:
        PolynomialSyntaxError: On any malformed term
    """
    compact = re.sub(r'\s+', '', text or '')
    if compact in ('', '0'):
        return []

    exponents = []
    for term in compact.split('+'):
        if not _MONOMIAL.match(term) or term.endswith('*'):
            raise PolynomialSyntaxError(f"Cannot parse term {term!r} in {text!r}")
        j = k = 0
        if term != '1':
            for variable, power in _FACTOR.findall(term):
                exponent = int(power) if power else 1
                if variable == 'x':
                    j += exponent
                else:
                    k += exponent
        exponents.append((j, k))
    return exponents


def format_monomial(j: int, k: int) -> str:
    parts = []
    if j:
        parts.append('x' if j == 1 else f'x^{j}')
    if k:
        parts.append('y' if k == 1 else f'y^{k}')
    return '*'.join(parts) if parts else '1'


# ----------------------------------------------------------------------
# Polynomials
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LatticePoly:
    """Element of GF(2)[x, y] modulo the torus relations, in canonical form."""

    shape: TorusShape
    terms: FrozenSet[Exponent]

    @classmethod
    def from_terms(cls, shape: TorusShape, exponents: Iterable[Exponent]) -> 'LatticePoly':
        counts = Counter(shape.canonicalize(j, k) for j, k in exponents)
        return cls(shape, frozenset(term for term, count in counts.items() if count % 2))

    @classmethod
    def parse(cls, text: str, shape: TorusShape) -> 'LatticePoly':
        return cls.from_terms(shape, parse_exponents(text))

    @classmethod
    def zero(cls, shape: TorusShape) -> 'LatticePoly':
        return cls(shape, frozenset())

    @classmethod
    def one(cls, shape: TorusShape) -> 'LatticePoly':
        return cls.monomial(shape, 0, 0)

    @classmethod
    def monomial(cls, shape: TorusShape, j: int, k: int) -> 'LatticePoly':
        return cls(shape, frozenset([shape.canonicalize(j, k)]))

    @classmethod
    def from_site_vector(cls, shape: TorusShape, vector) -> 'LatticePoly':
        bits = as_bits(vector, shape.sites)
        return cls(shape, frozenset(shape.coords(int(i)) for i in np.flatnonzero(bits)))

    def _check_shape(self, other: 'LatticePoly'):
        if self.shape != other.shape:
            raise ShapeMismatch(f"Polynomials on ({self.shape}) and ({other.shape})")

    def __add__(self, other: 'LatticePoly') -> 'LatticePoly':
        self._check_shape(other)
        return LatticePoly(self.shape, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: Union['LatticePoly', int]) -> 'LatticePoly':
        if isinstance(other, int):
            return self if other % 2 else LatticePoly.zero(self.shape)
        self._check_shape(other)
        return LatticePoly.from_terms(
            self.shape,
            ((a + c, b + d) for a, b in self.terms for c, d in other.terms),
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> 'LatticePoly':
        if exponent < 0:
            raise ValueError("Negative powers are only defined for monomials; use antipode")
        result, base = LatticePoly.one(self.shape), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def translate(self, monomial: Union['LatticePoly', Exponent]) -> 'LatticePoly':
        if isinstance(monomial, LatticePoly):
            if len(monomial.terms) != 1:
                raise ValueError("translate expects a single monomial")
            return self * monomial
        dj, dk = monomial
        return LatticePoly.from_terms(self.shape, ((j + dj, k + dk) for j, k in self.terms))

    def antipode(self) -> 'LatticePoly':
        return LatticePoly.from_terms(self.shape, ((-j, -k) for j, k in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> List[Exponent]:
        return sorted(self.terms, key=lambda term: (term[1], term[0]))

    def __iter__(self):
        return iter(self.sorted_terms())

    def to_site_vector(self) -> np.ndarray:
        vector = np.zeros(self.shape.sites, dtype=np.uint8)
        for j, k in self.terms:
            vector[k * self.shape.M + j] = 1
        return vector

    def check_block(self) -> np.ndarray:
        """
        Circulant check block: row s holds the sites s * a for each term a.

        Left multiplication by this polynomial on site vectors is the
        transpose of this block.
        """
        block = np.zeros((self.shape.sites, self.shape.sites), dtype=np.uint8)
        rows = np.arange(self.shape.sites)
        for j, k in self.terms:
            block[rows, translation_permutation(self.shape, j, k)] ^= 1
        return block

    def planar_terms(self) -> List[Exponent]:
        """Signed exponents of smallest displacement for every term."""
        planar = []
        for j, k in self.sorted_terms():
            ck = centered(k, self.shape.N)
            if ck != k:
                j = j - self.shape.alpha
            planar.append((centered(j, self.shape.M), ck))
        return planar

    def __str__(self) -> str:
        if not self.terms:
            return '0'
        return ' + '.join(format_monomial(j, k) for j, k in self.sorted_terms())

    def __repr__(self) -> str:
        return f"LatticePoly({self}; {self.shape})"


@dataclass(frozen=True)
class PauliVec:
    """Pair (left, right) of polynomials, one per qubit sublattice."""

    shape: TorusShape
    left: LatticePoly
    right: LatticePoly

    def __post_init__(self):
        if self.left.shape != self.shape or self.right.shape != self.shape:
            raise ShapeMismatch("PauliVec components must share the vector's shape")

    @classmethod
    def from_vector(cls, shape: TorusShape, vector) -> 'PauliVec':
        bits = as_bits(vector, 2 * shape.sites)
        return cls(
            shape,
            LatticePoly.from_site_vector(shape, bits[:shape.sites]),
            LatticePoly.from_site_vector(shape, bits[shape.sites:]),
        )

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.left.to_site_vector(), self.right.to_site_vector()])

    def __add__(self, other: 'PauliVec') -> 'PauliVec':
        return PauliVec(self.shape, self.left + other.left, self.right + other.right)

    @property
    def weight(self) -> int:
        return len(self.left) + len(self.right)

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


def displacement_span(planar: Sequence[Exponent], axis: str) -> int:
    """Extent max - min of planar displacements along one axis (0 for 'x')."""
    position = 0 if axis == 'x' else 1
    values = [term[position] for term in planar] or [0]
    return max(values) - min(values)

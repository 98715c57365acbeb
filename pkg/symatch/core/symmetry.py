"""
Symmetry Engine
Discovers, verifies and enumerates symmetries and subsymmetries of Z-checks

A symmetry is a set of check sites whose product is the identity. In
polynomial language its support Sigma satisfies Sigma*A = Sigma*B = 0, so
every single-qubit flip violates an even number of its checks.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config.settings import SYMMETRY_DEFAULTS
from .bb_code import BBCode
from .errors import SymatchError
from .gf2 import BinaryMatrix, RowSpace, kernel
from .lattice import Exponent, LatticePoly, TorusShape

logger = logging.getLogger(__name__)


class SymmetryError(SymatchError):
    """Exception raised by the symmetry engine"""
    pass


class NotASymmetry(SymmetryError):
    """Raised when a support fails the symmetry condition"""
    pass


class DependentSet(SymmetryError):
    """Raised when translated symmetries are linearly dependent"""
    pass


class NoPowerOfTwoOrder(SymmetryError):
    """Raised when f^(2^l) = 1 has no solution within the configured bound"""
    pass


class TooManySymmetries(SymmetryError):
    """Raised when 2^K - 1 combinations would exceed the generator cap"""
    pass


@dataclass(frozen=True)
class Symmetry:
    """Check-site support of a symmetry and its selector label."""

    support: LatticePoly
    label: Tuple[int, ...] = ()

    @property
    def shape(self) -> TorusShape:
        return self.support.shape

    @property
    def site_vector(self) -> np.ndarray:
        return self.support.to_site_vector()

    @property
    def sites(self) -> np.ndarray:
        return np.flatnonzero(self.site_vector)

    @property
    def check_count(self) -> int:
        return len(self.support)

    def __add__(self, other: 'Symmetry') -> 'Symmetry':
        label = tuple(a ^ b for a, b in zip(self.label, other.label)) if self.label and other.label else ()
        return Symmetry(self.support + other.support, label)

    def to_dict(self):
        return {
            'support': str(self.support),
            'checks': self.check_count,
            'label': list(self.label),
        }

    def __str__(self) -> str:
        return f"Symmetry({self.check_count} checks: {self.support})"


@dataclass(frozen=True)
class Subsymmetry:
    """Symmetry with respect to errors on one sublattice only."""

    side: str
    support: LatticePoly

    @property
    def site_vector(self) -> np.ndarray:
        return self.support.to_site_vector()


def is_symmetry(code: BBCode, support: Union[LatticePoly, np.ndarray]) -> bool:
    vector = support.to_site_vector() if isinstance(support, LatticePoly) else np.asarray(support)
    return not ((vector @ code.hz_dense) & 1).any()


def is_subsymmetry(code: BBCode, support: LatticePoly, side: str) -> bool:
    product = support * (code.A if side == 'L' else code.B)
    return product.is_zero()


def _verified(code: BBCode, support: LatticePoly, label: Tuple[int, ...] = ()) -> Symmetry:
    if not is_symmetry(code, support):
        raise NotASymmetry(f"Support {support} is not a symmetry of {code.name}")
    return Symmetry(support, label)


def _with_unit_labels(code: BBCode, vectors: Sequence[np.ndarray]) -> List[Symmetry]:
    count = len(vectors)
    symmetries = []
    for index, vector in enumerate(vectors):
        label = tuple(1 if j == index else 0 for j in range(count))
        symmetries.append(_verified(code, LatticePoly.from_site_vector(code.shape, vector), label))
    return symmetries


def discover_symmetries_gauss(code: BBCode) -> List[Symmetry]:
    """
    Symmetries read from the row-reduction transcript of H_Z.

    Every all-zero row j of RR(H_Z) = Gamma H_Z marks the checks
    {l : Gamma[j, l] = 1} as a symmetry. Rows are returned in pivot order.

    Returns:
        MN - rank(H_Z) independent, verified symmetries
    """
    reduction = code.hz_reduction
    transform = reduction.transform.to_array()
    vectors = [transform[row] for row in range(reduction.rank, code.sites)]
    symmetries = _with_unit_labels(code, vectors)
    logger.debug(f"{code.name}: {len(symmetries)} symmetries from the elimination transcript")
    return symmetries


def discover_symmetries_kernel(code: BBCode) -> List[Symmetry]:
    """Basis of the left kernel of H_Z, used to cross-check the transcript method."""
    basis = kernel(code.hz.T)
    return _with_unit_labels(code, list(basis))


def same_span(first: Sequence[Symmetry], second: Sequence[Symmetry]) -> bool:
    if not first and not second:
        return True
    cols = (first or second)[0].shape.sites
    space = RowSpace(cols, [s.site_vector for s in first])
    dimension = space.dimension
    return all(space.contains(s.site_vector) for s in second) and \
        RowSpace(cols, [s.site_vector for s in second]).dimension == dimension


def translated_generating_set(
    code: BBCode,
    symmetry: Union[Symmetry, LatticePoly],
    translations: Iterable[Exponent],
) -> List[Symmetry]:
    """
    Translate a symmetry by each monomial and check independence.

    Args:
        code: Code the symmetry belongs to
        symmetry: Base symmetry (or its support polynomial)
        translations: Monomial exponents (j, k)

    Returns:
        One verified symmetry per translation

    Raises:
        NotASymmetry: If the base support is not a symmetry
        DependentSet: If the translates are linearly dependent
    """
    support = symmetry.support if isinstance(symmetry, Symmetry) else symmetry
    _verified(code, support)

    translations = list(translations)
    space = RowSpace(code.sites)
    generated = []
    for index, shift in enumerate(translations):
        translated = support.translate(shift)
        if not space.add(translated.to_site_vector()):
            raise DependentSet(f"Translation {shift} is dependent on the previous ones")
        label = tuple(1 if j == index else 0 for j in range(len(translations)))
        generated.append(_verified(code, translated, label))
    return generated


def discover_subsymmetries(code: BBCode, side: str) -> List[Subsymmetry]:
    """
    Subsymmetries for one sublattice.

    Side L returns a basis of {Sigma : Sigma*A = 0}; flips on L qubits then
    violate an even number of its checks. Side R uses B.
    """
    if side not in ('L', 'R'):
        raise ValueError(f"Side must be 'L' or 'R', got {side!r}")
    block = code.hz_dense[:, :code.sites] if side == 'L' else code.hz_dense[:, code.sites:]
    basis = kernel(BinaryMatrix.from_array(block.T))

    subsymmetries = []
    for vector in basis:
        support = LatticePoly.from_site_vector(code.shape, vector)
        if not is_subsymmetry(code, support, side):
            raise NotASymmetry(f"Kernel vector {support} is not an {side}-subsymmetry")
        subsymmetries.append(Subsymmetry(side, support))
    return subsymmetries


def power_of_two_order(poly: LatticePoly, bound: int) -> int:
    """Smallest L = 2^l <= bound with poly^L = 1."""
    one = LatticePoly.one(poly.shape)
    power, order = poly, 1
    while order <= bound:
        if power == one:
            return order
        power = power * power
        order *= 2
    raise NoPowerOfTwoOrder(f"{poly} has no power-of-two order up to {bound}")


def doubling_product(poly: LatticePoly, order: int) -> LatticePoly:
    """(1 + f)(1 + f^2)...(1 + f^(order/2)); the empty product is 1."""
    one = LatticePoly.one(poly.shape)
    result, power, exponent = one, poly, 1
    while exponent < order:
        result = result * (one + power)
        power = power * power
        exponent *= 2
    return result


def infinite_symmetry(
    code: BBCode,
    translations: Iterable[Exponent] = (),
    bound: Optional[int] = None,
) -> List[Symmetry]:
    """
    Symmetry Sigma_f Sigma_g for A = 1 + f, B = 1 + g.

    With f^(L_f) = 1 for L_f a power of two, Sigma_f (1 + f) = 1 + f^(L_f) = 0.

    Args:
        code: Code with A = 1 + f and B = 1 + g
        translations: Extra monomial translates to return
        bound: Largest power of two tried

    Returns:
        The symmetry followed by its requested translates

    Raises:
        NoPowerOfTwoOrder: If f or g has no power-of-two order within bound
    """
    bound = bound or SYMMETRY_DEFAULTS["infinite-order-bound"]
    one = LatticePoly.one(code.shape)
    f, g = code.A + one, code.B + one

    support = doubling_product(f, power_of_two_order(f, bound)) * \
        doubling_product(g, power_of_two_order(g, bound))
    symmetries = [_verified(code, support)]
    symmetries.extend(_verified(code, support.translate(shift)) for shift in translations)
    return symmetries


def enumerate_combinations(
    generators: Sequence[Symmetry],
    max_generators: Optional[int] = None,
) -> List[Tuple[int, Symmetry]]:
    """
    All 2^K - 1 nonzero combinations of K generators.

    The selector v is an integer whose bit j selects generator j.

    Raises:
        TooManySymmetries: If K exceeds the configured cap
    """
    cap = max_generators or SYMMETRY_DEFAULTS["max-generators"]
    count = len(generators)
    if count > cap:
        raise TooManySymmetries(f"{count} generators exceed the cap of {cap}")

    combinations = []
    for selector in range(1, 1 << count):
        support = LatticePoly.zero(generators[0].shape)
        for j in range(count):
            if selector >> j & 1:
                support = support + generators[j].support
        label = tuple(selector >> j & 1 for j in range(count))
        combinations.append((selector, Symmetry(support, label)))
    return combinations

"""
Cylinder Trick
Extracts the logical operator carried by a symmetry, doubling small lattices

Cutting the torus into two cylinder bands U and V, the product of the
symmetry's checks over U is supported near the two cuts only. Its two
bands P1 and P2 are logical operators; the parity of an error's overlap
with P1 is the commutator bit that matching estimates.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import CYLINDER_DEFAULTS
from .bb_code import BBCode, build_code
from .errors import SymatchError
from .gf2 import BinaryMatrix, RowSpace, as_bits, inverse
from .lattice import LatticePoly, TorusShape, site_grid
from .symmetry import Symmetry, discover_symmetries_gauss, is_symmetry

logger = logging.getLogger(__name__)

DIRECTIONS = ('vertical', 'horizontal')

# A vertical logical wraps in y, so the torus is cut at fixed x.
LIMITING_AXIS = {'vertical': 'x', 'horizontal': 'y'}


class CylinderError(SymatchError):
    """Exception raised by the cylinder trick"""
    pass


class SplitFailure(CylinderError):
    """Raised when the half-cylinder product does not separate into two bands"""
    pass


class TrivialLogical(CylinderError):
    """Raised when the extracted band is a product of Z-checks"""
    pass


class RecursionLimit(CylinderError):
    """Raised when lattice doubling exceeds the configured depth"""
    pass


class LogicalSpanError(CylinderError):
    """Raised when the extracted logicals do not span the logical space"""
    pass


@dataclass(frozen=True)
class CylinderResult:
    direction: str
    cut: int
    logical: np.ndarray
    partner: np.ndarray
    used_doubling: bool = False
    doubling_factor: int = 1

    @property
    def weight(self) -> int:
        return int(self.logical.sum())


def cut_coordinates(shape: TorusShape, direction: str) -> Tuple[np.ndarray, int]:
    """
    Coordinate along the cut axis for every site, and its period.

    Vertical cuts use N*j - alpha*k modulo MN, which is constant along the
    closed (alpha, N) direction of a twisted torus and equals N*j when
    alpha = 0. Horizontal cuts use k.
    """
    xs, ys = site_grid(shape)
    if direction == 'vertical':
        period = shape.M * shape.N
        return np.mod(shape.N * xs - shape.alpha * ys, period), period
    if direction == 'horizontal':
        return ys, shape.N
    raise ValueError(f"Direction must be one of {DIRECTIONS}, got {direction!r}")


def stabilizer_diameter(code: BBCode, direction: str) -> int:
    """Extent of check supports along the cut coordinate."""
    shape = code.shape
    if direction == 'vertical':
        values = [shape.N * dj - shape.alpha * dk for dj, dk in code.planar_a + code.planar_b]
    else:
        values = [dk for _, dk in code.planar_a + code.planar_b]
    values.append(0)
    return max(values) - min(values)


def default_cut(shape: TorusShape, direction: str) -> int:
    return cut_coordinates(shape, direction)[1] // 2


def half_cylinder_product(
    code: BBCode,
    symmetry: Symmetry,
    direction: str,
    cut: int,
    upper: bool = True,
) -> np.ndarray:
    """Sum of check supports over the symmetry's sites in [0, cut) (or the rest)."""
    coords, _ = cut_coordinates(code.shape, direction)
    in_band = coords < cut if upper else coords >= cut
    selected = (symmetry.site_vector.astype(bool) & in_band).astype(np.uint8)
    return ((selected @ code.hz_dense) & 1).astype(np.uint8)


def _split_bands(
    code: BBCode,
    product: np.ndarray,
    direction: str,
    diameter: int,
) -> Tuple[np.ndarray, np.ndarray]:
    coords, period = cut_coordinates(code.shape, direction)
    qubits = np.flatnonzero(product)
    qubit_coords = coords[qubits % code.sites]
    distinct = np.unique(qubit_coords)
    if distinct.size < 2:
        raise SplitFailure(f"Half-cylinder product occupies {distinct.size} coordinate(s)")

    gaps = np.diff(np.append(distinct, distinct[0] + period))
    first, second = sorted(np.argsort(-gaps, kind='stable')[:2].tolist())
    if gaps[first] <= diameter or gaps[second] <= diameter:
        raise SplitFailure(
            f"Largest gaps ({gaps[first]}, {gaps[second]}) do not exceed the diameter {diameter}"
        )

    inner = set(distinct[first + 1:second + 1].tolist())
    in_inner = np.array([c in inner for c in qubit_coords], dtype=bool)

    def distance_to_origin(band_coords) -> int:
        return min(min(c, period - c) for c in band_coords)

    inner_coords = [c for c in distinct.tolist() if c in inner]
    outer_coords = [c for c in distinct.tolist() if c not in inner]
    near_origin_inner = distance_to_origin(inner_coords) < distance_to_origin(outer_coords)

    p1 = np.zeros_like(product)
    p2 = np.zeros_like(product)
    chosen = in_inner if near_origin_inner else ~in_inner
    p1[qubits[chosen]] = 1
    p2[qubits[~chosen]] = 1
    return p1, p2


def cylinder_trick(
    code: BBCode,
    symmetry: Symmetry,
    direction: str,
    cut: Optional[int] = None,
    stabilizers: Optional[RowSpace] = None,
) -> CylinderResult:
    """
    Extract the logical operator of a symmetry for one cylinder direction.

    Args:
        code: Code on which the symmetry lives
        symmetry: Nonempty verified symmetry
        direction: 'vertical' or 'horizontal'
        cut: Cut coordinate; defaults to half the period
        stabilizers: Cached row space of H_Z

    Returns:
        CylinderResult with the band nearest coordinate 0 as the logical

    Raises:
        SplitFailure: If the product does not separate into two bands, or a
            band fails to commute with H_X
        TrivialLogical: If the band is a product of Z-checks
    """
    if symmetry.check_count == 0:
        raise ValueError("The cylinder trick needs a nonempty symmetry")
    if not is_symmetry(code, symmetry.site_vector):
        raise ValueError(f"{symmetry} is not a symmetry of {code.name}")

    cut = default_cut(code.shape, direction) if cut is None else cut
    product = half_cylinder_product(code, symmetry, direction, cut)
    p1, p2 = _split_bands(code, product, direction, stabilizer_diameter(code, direction))

    if ((code.hx_dense @ p1) & 1).any():
        raise SplitFailure("Extracted band does not commute with the X-checks")
    stabilizers = stabilizers or RowSpace.from_matrix(code.hz)
    if stabilizers.contains(p1):
        raise TrivialLogical(f"{direction} band of {symmetry} is a stabilizer")

    return CylinderResult(direction=direction, cut=cut, logical=p1, partner=p2)


# ----------------------------------------------------------------------
# Lattice doubling
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DoubledContext:
    """
    Matching code covering a base code, with its fold and lift maps.

    factor is 1 for the base code itself.
    """

    base: BBCode
    code: BBCode
    factor: int
    axes: Tuple[str, ...]
    site_fold: np.ndarray
    qubit_fold: np.ndarray

    @property
    def used_doubling(self) -> bool:
        return self.factor > 1

    def fold(self, vector) -> np.ndarray:
        bits = as_bits(vector, self.code.n)
        return (np.bincount(self.qubit_fold, weights=bits, minlength=self.base.n).astype(np.int64) & 1).astype(np.uint8)

    def duplicate(self, syndrome) -> np.ndarray:
        return as_bits(syndrome, self.base.sites)[self.site_fold]

    def lift(self, error) -> np.ndarray:
        return as_bits(error, self.base.n)[self.qubit_fold]


def identity_context(code: BBCode) -> DoubledContext:
    sites = np.arange(code.sites)
    return DoubledContext(
        base=code, code=code, factor=1, axes=(),
        site_fold=sites, qubit_fold=np.arange(code.n),
    )


def doubled_decode_context(context, limiting_axis: str) -> DoubledContext:
    """
    Double the matching lattice along one axis.

    The doubled code uses the planar polynomials of the base, so each of
    its checks folds onto a base check. Syndromes are duplicated onto both
    preimages of every base site.

    Args:
        context: A BBCode or an existing DoubledContext
        limiting_axis: 'x' or 'y'

    Returns:
        DoubledContext for the doubled lattice
    """
    if isinstance(context, BBCode):
        context = identity_context(context)

    base = context.base
    shape = context.code.shape.doubled(limiting_axis)
    A = LatticePoly.from_terms(shape, base.planar_a)
    B = LatticePoly.from_terms(shape, base.planar_b)
    factor = context.factor * 2
    code = build_code(
        A, B, shape,
        name=f"{base.name}/x{factor}",
        distance=base.distance,
        planar_a=base.planar_a,
        planar_b=base.planar_b,
    )

    xs, ys = site_grid(shape)
    site_fold = np.array([base.shape.index(int(j), int(k)) for j, k in zip(xs, ys)], dtype=np.int64)
    qubit_fold = np.concatenate([site_fold, site_fold + base.sites])

    logger.info(f"Doubled {base.name} along {limiting_axis} to ({shape}), n={code.n}")
    return DoubledContext(
        base=base, code=code, factor=factor,
        axes=context.axes + (limiting_axis,),
        site_fold=site_fold, qubit_fold=qubit_fold,
    )


# ----------------------------------------------------------------------
# Logical channels
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LogicalChannel:
    """A symmetry on the matching code with its cylinder logical, before and after folding."""

    direction: str
    context: DoubledContext
    symmetry: Symmetry
    logical: np.ndarray
    base_logical: np.ndarray
    cut: int

    @property
    def result(self) -> CylinderResult:
        return CylinderResult(
            direction=self.direction, cut=self.cut, logical=self.logical,
            partner=np.zeros_like(self.logical),
            used_doubling=self.context.used_doubling,
            doubling_factor=self.context.factor,
        )


def _channels_on(
    context: DoubledContext,
    direction: str,
    base_stabilizers: RowSpace,
    limit: int,
) -> List[LogicalChannel]:
    code = context.code
    stabilizers = RowSpace.from_matrix(code.hz)
    cut = default_cut(code.shape, direction)
    selected = base_stabilizers.copy()

    channels = []
    for symmetry in discover_symmetries_gauss(code):
        try:
            result = cylinder_trick(code, symmetry, direction, cut, stabilizers)
        except TrivialLogical:
            logger.debug(f"{code.name}: {direction} logical of {symmetry} is trivial")
            continue
        folded = context.fold(result.logical)
        if not selected.add(folded):
            continue
        channels.append(LogicalChannel(
            direction=direction, context=context, symmetry=symmetry,
            logical=result.logical, base_logical=folded, cut=cut,
        ))
        if len(channels) == limit:
            break
    return channels


def build_direction_channels(
    code: BBCode,
    direction: str,
    max_doublings: Optional[int] = None,
) -> List[LogicalChannel]:
    """
    Generator channels for one direction, doubling the lattice on failure.

    Raises:
        RecursionLimit: If the split still fails after max_doublings
    """
    max_doublings = CYLINDER_DEFAULTS["max-doublings"] if max_doublings is None else max_doublings
    base_stabilizers = RowSpace.from_matrix(code.hz)
    context = identity_context(code)

    for attempt in range(max_doublings + 1):
        try:
            channels = _channels_on(context, direction, base_stabilizers, code.symmetry_count)
            logger.info(
                f"{code.name}: {len(channels)} {direction} channels on ({context.code.shape})"
            )
            return channels
        except SplitFailure as e:
            logger.debug(f"{context.code.name}: {direction} split failed ({e})")
            if attempt == max_doublings:
                break
            context = doubled_decode_context(context, LIMITING_AXIS[direction])

    raise RecursionLimit(
        f"{code.name}: {direction} cylinder split failed after {max_doublings} doublings"
    )


@dataclass(frozen=True)
class LogicalFrame:
    """
    Independent generator logicals used to assemble corrections.

    duals[i] . logicals[j] = delta_ij, with duals X-type logicals.
    """

    keys: Tuple[Tuple[str, int], ...]
    logicals: np.ndarray
    duals: np.ndarray


def build_logical_frame(code: BBCode, channels: Dict[str, List[LogicalChannel]]) -> LogicalFrame:
    """
    Select k independent generator logicals and their X-type duals.

    Raises:
        LogicalSpanError: If the channels do not span all k Z-logicals
    """
    space = RowSpace.from_matrix(code.hz)
    keys, chosen = [], []
    for direction in DIRECTIONS:
        for index, channel in enumerate(channels.get(direction, [])):
            if space.add(channel.base_logical):
                keys.append((direction, index))
                chosen.append(channel.base_logical)

    if len(chosen) != code.k:
        raise LogicalSpanError(
            f"{code.name}: cylinder logicals span {len(chosen)} of {code.k} Z-logicals"
        )
    if code.k == 0:
        empty = np.zeros((0, code.n), dtype=np.uint8)
        return LogicalFrame(keys=(), logicals=empty, duals=empty)

    logicals = BinaryMatrix.from_rows(chosen, code.n)
    x_basis = code.logical_basis().x
    duals = inverse(x_basis @ logicals.T) @ x_basis
    return LogicalFrame(keys=tuple(keys), logicals=logicals.to_array(), duals=duals.to_array())


def logical_pairs(code: BBCode, max_doublings: Optional[int] = None) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Horizontal and vertical cylinder logicals, paired by generator index.

    Raises:
        LogicalSpanError: If together they do not span the Z-logical space
    """
    channels = {d: build_direction_channels(code, d, max_doublings) for d in DIRECTIONS}
    build_logical_frame(code, channels)
    return [
        (horizontal.base_logical, vertical.base_logical)
        for horizontal, vertical in zip(channels['horizontal'], channels['vertical'])
    ]

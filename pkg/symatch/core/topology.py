"""
Topology Analyzer
Counts the toric-code copies of a BB code and the translation action on them

String operators are read off long ribbons of the code on the infinite
plane: horizontal ribbons carry X-type strings, vertical ribbons carry
Z-type strings. Their commutation matrix, brought to Smith normal form,
has rank K = number of toric-code copies. Shifting the vertical strings by
one site and pairing them with the horizontal basis gives the translation
actions P_x and P_y; their orders fix the unfrustrated torus.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from ..config.settings import TOPOLOGY_DEFAULTS
from .bb_code import BBCode, build_code
from .errors import SymatchError
from .gf2 import BinaryMatrix, SingularMatrix, inverse, kernel, smith_normal_form
from .lattice import Exponent, LatticePoly, TorusShape, displacement_span

logger = logging.getLogger(__name__)

Qubit = Tuple[int, int, int]


class TopologyError(SymatchError):
    """Exception raised by the topology analyzer"""
    pass


class RegionTooSmall(TopologyError):
    """Raised when the string count does not stabilise as ribbons widen"""
    pass


class OrderSearchExceeded(TopologyError):
    """Raised when a translation action has no order below the cap"""
    pass


class SingularAction(TopologyError):
    """Raised when a shifted commutation matrix is not invertible"""
    pass


@dataclass(frozen=True)
class RibbonRegion:
    """
    Ribbon of sites centred on the origin.

    Horizontal ribbons run along x with their end strips at both x ends;
    vertical ribbons run along y.
    """

    orientation: str
    length: int
    width: int
    end_strip: int

    def __post_init__(self):
        if self.orientation not in ('horizontal', 'vertical'):
            raise ValueError(f"Orientation must be horizontal or vertical, got {self.orientation!r}")
        if min(self.length, self.width, self.end_strip) < 0:
            raise ValueError("Ribbon dimensions must be non-negative")

    def _ranges(self) -> Tuple[range, range]:
        along = range(-(self.length // 2), -(self.length // 2) + self.length)
        across = range(-(self.width // 2), -(self.width // 2) + self.width)
        return (along, across) if self.orientation == 'horizontal' else (across, along)

    def sites(self) -> List[Exponent]:
        xs, ys = self._ranges()
        return [(x, y) for y in ys for x in xs]

    def in_end_strip(self, x: int, y: int) -> bool:
        along = x if self.orientation == 'horizontal' else y
        start = -(self.length // 2)
        return along < start + self.end_strip or along >= start + self.length - self.end_strip

    @property
    def is_empty(self) -> bool:
        return self.length == 0 or self.width == 0


@dataclass(frozen=True)
class StringSegments:
    """Kernel of the restricted check matrix, over the ribbon's qubits."""

    region: RibbonRegion
    qubits: Tuple[Qubit, ...]
    vectors: np.ndarray
    enforced_checks: int

    @property
    def dimension(self) -> int:
        return self.vectors.shape[0]


def _check_offsets(code: BBCode, check_type: str) -> List[Qubit]:
    """Qubit offsets (dx, dy, side) of a check relative to its site; side 0 is L."""
    if check_type == 'Z':
        return [(j, k, 0) for j, k in code.planar_a] + [(j, k, 1) for j, k in code.planar_b]
    return [(-j, -k, 0) for j, k in code.planar_b] + [(-j, -k, 1) for j, k in code.planar_a]


def stabilizer_range(code: BBCode) -> int:
    planar = code.planar_a + code.planar_b
    return max(displacement_span(planar, 'x'), displacement_span(planar, 'y'))


def string_segments(code: BBCode, region: RibbonRegion) -> StringSegments:
    """
    String operators supported on a ribbon.

    Every check with support on the ribbon is enforced except those whose
    ribbon support lies entirely in the end strips, so strings may end
    there. Horizontal ribbons enforce Z-checks (their strings are X-type);
    vertical ribbons enforce X-checks.

    Returns:
        StringSegments including stabilizers and nontrivial segments
    """
    sites = region.sites()
    qubits = tuple((x, y, side) for x, y in sites for side in (0, 1))
    if region.is_empty:
        return StringSegments(region, qubits, np.zeros((0, 0), dtype=np.uint8), 0)

    position = {qubit: index for index, qubit in enumerate(qubits)}
    offsets = _check_offsets(code, 'Z' if region.orientation == 'horizontal' else 'X')
    candidates = sorted({(x - dx, y - dy) for x, y in sites for dx, dy, _ in offsets})

    rows = []
    for cx, cy in candidates:
        support = [
            position[(cx + dx, cy + dy, side)]
            for dx, dy, side in offsets
            if (cx + dx, cy + dy, side) in position
        ]
        if not support:
            continue
        if all(region.in_end_strip(qubits[i][0], qubits[i][1]) for i in support):
            continue
        row = np.zeros(len(qubits), dtype=np.uint8)
        for index in support:
            row[index] ^= 1
        rows.append(row)

    matrix = BinaryMatrix.from_rows(rows, len(qubits))
    vectors = kernel(matrix).to_array() if rows else np.eye(len(qubits), dtype=np.uint8)
    return StringSegments(region, qubits, vectors, len(rows))


class _Box:
    """Square window holding both ribbons with a one-site margin for shifts."""

    def __init__(self, length: int):
        self.half = length // 2 + 2
        self.side = 2 * self.half

    @property
    def size(self) -> int:
        return self.side * self.side * 2

    def embed(self, segments: StringSegments) -> np.ndarray:
        columns = [((y + self.half) * self.side + (x + self.half)) * 2 + s for x, y, s in segments.qubits]
        embedded = np.zeros((segments.dimension, self.size), dtype=np.uint8)
        if segments.dimension:
            embedded[:, columns] = segments.vectors
        return embedded

    def shift(self, vectors: np.ndarray, dx: int, dy: int) -> np.ndarray:
        grid = vectors.reshape(-1, self.side, self.side, 2)
        return np.roll(grid, (dy, dx), axis=(1, 2)).reshape(vectors.shape)


def _pairing(first: np.ndarray, second: np.ndarray) -> BinaryMatrix:
    return BinaryMatrix.from_array((first.astype(np.int64) @ second.T.astype(np.int64)) & 1)


def action_order(action: BinaryMatrix, cap: Optional[int] = None) -> int:
    """Smallest R >= 1 with action^R = identity."""
    cap = cap or TOPOLOGY_DEFAULTS["order-cap"]
    identity = BinaryMatrix.identity(action.rows)
    power = action
    for order in range(1, cap + 1):
        if power == identity:
            return order
        power = power @ action
    raise OrderSearchExceeded(f"Translation action has no order up to {cap}")


@dataclass(frozen=True)
class AnyonBasis:
    K: int
    horizontal: np.ndarray
    vertical: np.ndarray
    p_x: BinaryMatrix
    p_y: BinaryMatrix
    r_x: int
    r_y: int
    width: int
    length: int
    end_strip: int

    def to_dict(self) -> Dict[str, int]:
        return {
            'K': self.K,
            'Rx': self.r_x,
            'Ry': self.r_y,
            'width': self.width,
            'length': self.length,
            'end-strip': self.end_strip,
        }


class _Ribbons(NamedTuple):
    box: _Box
    horizontal: np.ndarray
    vertical: np.ndarray
    commutation: BinaryMatrix


def _ribbons(code: BBCode, width: int, length: int, end_strip: int) -> _Ribbons:
    box = _Box(length)
    horizontal = box.embed(string_segments(code, RibbonRegion('horizontal', length, width, end_strip)))
    vertical = box.embed(string_segments(code, RibbonRegion('vertical', length, width, end_strip)))
    return _Ribbons(box, horizontal, vertical, _pairing(horizontal, vertical))


def _copy_count(ribbons: _Ribbons) -> int:
    _, diagonal, _ = smith_normal_form(ribbons.commutation)
    return int(np.trace(diagonal.to_array()[:min(diagonal.shape)].astype(np.int64)))


def anyon_analysis(
    code: BBCode,
    width: Optional[int] = None,
    length: Optional[int] = None,
    end_strip: Optional[int] = None,
    order_cap: Optional[int] = None,
) -> AnyonBasis:
    """
    Toric-code copy count K and translation actions of a BB code.

    Ribbons start at width 2r + 2 for stabilizer range r and widen one site
    at a time until K agrees for two consecutive widths.

    Args:
        code: Code whose planar polynomials are analysed
        width, length, end_strip: Fixed ribbon geometry; length defaults to
            three widths and end_strip to r + 1
        order_cap: Largest translation order searched

    Raises:
        RegionTooSmall: If K does not stabilise within the growth budget
        SingularAction: If a shifted commutation matrix is singular
        OrderSearchExceeded: If an action order exceeds the cap
    """
    r = stabilizer_range(code)
    ratio = TOPOLOGY_DEFAULTS["length-to-width"]
    end_strip = r + 1 if end_strip is None else end_strip

    def geometry(w: int) -> Tuple[int, int]:
        return w, length if length is not None else ratio * w

    w = width if width is not None else 2 * r + 2
    ribbons = _ribbons(code, *geometry(w), end_strip)
    if width is None:
        for _ in range(TOPOLOGY_DEFAULTS["max-width-growth"]):
            wider = _ribbons(code, *geometry(w + 1), end_strip)
            if _copy_count(wider) == _copy_count(ribbons):
                break
            w, ribbons = w + 1, wider
        else:
            raise RegionTooSmall(f"{code.name}: string count still changing at width {w}")

    U, diagonal, W = smith_normal_form(ribbons.commutation)
    K = int(np.trace(diagonal.to_array()[:min(diagonal.shape)].astype(np.int64)))
    h_basis = (inverse(U).to_array().astype(np.int64) @ ribbons.horizontal & 1)[:K].astype(np.uint8)
    v_basis = (inverse(W).T.to_array().astype(np.int64) @ ribbons.vertical & 1)[:K].astype(np.uint8)

    try:
        p_x = inverse(_pairing(h_basis, ribbons.box.shift(v_basis, 1, 0)))
        p_y = inverse(_pairing(h_basis, ribbons.box.shift(v_basis, 0, 1)))
    except SingularMatrix as e:
        raise SingularAction(f"{code.name}: shifted commutation matrix is singular ({e})")

    basis = AnyonBasis(
        K=K,
        horizontal=h_basis,
        vertical=v_basis,
        p_x=p_x,
        p_y=p_y,
        r_x=action_order(p_x, order_cap),
        r_y=action_order(p_y, order_cap),
        width=w,
        length=geometry(w)[1],
        end_strip=end_strip,
    )
    logger.info(f"{code.name}: K={basis.K}, Rx={basis.r_x}, Ry={basis.r_y} (ribbon width {w})")
    return basis


class UnfrustratedTorus(NamedTuple):
    Lx: int
    Ly: int
    z_symmetries: int
    symmetry_count: int


def symmetry_count(code: BBCode, Lx: int, Ly: int) -> Tuple[int, int]:
    """Z-symmetries and total symmetries of the code's planar polynomials on an Lx x Ly torus."""
    shape = TorusShape(Lx, Ly, 0)
    torus_code = build_code(
        LatticePoly.from_terms(shape, code.planar_a),
        LatticePoly.from_terms(shape, code.planar_b),
        shape,
        name=f"{code.name}@{shape}",
        planar_a=code.planar_a,
        planar_b=code.planar_b,
    )
    z_symmetries = torus_code.symmetry_count
    return z_symmetries, 2 * z_symmetries


def unfrustrated_torus(
    code: BBCode,
    analysis: Optional[AnyonBasis] = None,
    size: Optional[Tuple[int, int]] = None,
) -> UnfrustratedTorus:
    """
    Symmetry count on an unfrustrated torus.

    Without an explicit size the torus is Lx x Ly with Lx the smallest
    multiple of R_x exceeding the stabilizer extent in x (likewise y).
    An explicit size is counted as given, which exposes frustrated tori.
    """
    if size is None:
        analysis = analysis or anyon_analysis(code)
        planar = code.planar_a + code.planar_b
        span_x = displacement_span(planar, 'x')
        span_y = displacement_span(planar, 'y')
        Lx = (span_x // analysis.r_x + 1) * analysis.r_x
        Ly = (span_y // analysis.r_y + 1) * analysis.r_y
    else:
        Lx, Ly = size

    z_symmetries, total = symmetry_count(code, Lx, Ly)
    logger.info(f"{code.name} on a {Lx}x{Ly} torus: {z_symmetries} Z-symmetries, {total} in total")
    return UnfrustratedTorus(Lx, Ly, z_symmetries, total)

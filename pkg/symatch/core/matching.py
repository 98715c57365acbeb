"""
Matching Engine
Symmetry graphs, shortest paths and minimum-weight perfect matching

The symmetry graph of a symmetry has its check sites as vertices and one
edge per qubit joining the two symmetry checks the qubit violates. Qubits
violating more than two checks of the symmetry become hyperedges, modelled
as a complete graph on the violated checks.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ..config.settings import MATCHING_DEFAULTS
from .bb_code import BBCode
from .errors import SymatchError
from .gf2 import as_bits
from .symmetry import Symmetry

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class MatchingError(SymatchError):
    """Exception raised by the matching engine"""
    pass


class OddParity(MatchingError):
    """Raised when a qubit violates an odd number of a symmetry's checks"""
    pass


class OddDefectCount(MatchingError):
    """Raised when a restricted syndrome has odd weight"""
    pass


class DisconnectedDefect(MatchingError):
    """Raised when the defects admit no perfect matching"""
    pass


@dataclass(frozen=True)
class Incidence:
    """Weight-free edge list of a symmetry graph (vertex positions, qubit, hyperedge size)."""

    u: np.ndarray
    v: np.ndarray
    qubit: np.ndarray
    multiplicity: np.ndarray
    hyperedge_groups: Dict[int, List[int]]


def _incidence(code: BBCode, vertices: np.ndarray) -> Incidence:
    restricted = code.hz_dense[vertices]
    qubits, positions = np.nonzero(restricted.T)
    counts = np.bincount(qubits, minlength=code.n)

    odd = np.flatnonzero(counts % 2)
    if odd.size:
        raise OddParity(f"Qubit {int(odd[0])} violates {int(counts[odd[0]])} symmetry checks")

    us, vs, qs, ms = [], [], [], []
    groups: Dict[int, List[int]] = {}
    starts = np.concatenate([[0], np.cumsum(counts)])
    for q in np.flatnonzero(counts):
        touched = positions[starts[q]:starts[q + 1]]
        m = len(touched)
        for a in range(m):
            for b in range(a + 1, m):
                if m > 2:
                    groups.setdefault(int(q), []).append(len(us))
                us.append(int(touched[a]))
                vs.append(int(touched[b]))
                qs.append(int(q))
                ms.append(m)

    return Incidence(
        u=np.array(us, dtype=np.int64),
        v=np.array(vs, dtype=np.int64),
        qubit=np.array(qs, dtype=np.int64),
        multiplicity=np.array(ms, dtype=np.int64),
        hyperedge_groups=groups,
    )


@dataclass
class SymmetryGraph:
    """
    Weighted symmetry graph with cached shortest paths.

    Between any vertex pair only the lightest edge is kept, ties going to
    the lowest qubit index. Shortest-path rows are computed on demand and
    kept for the lifetime of the graph.
    """

    code: BBCode
    symmetry: Symmetry
    vertices: np.ndarray
    incidence: Incidence
    qubit_weights: np.ndarray
    hyperedge_weighting: str = 'full'
    _rows: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        inc = self.incidence
        weights = self.qubit_weights[inc.qubit].astype(float)
        if self.hyperedge_weighting == 'divided':
            hyper = inc.multiplicity > 2
            weights[hyper] = weights[hyper] / (inc.multiplicity[hyper] / 2.0)
        self.edge_weights = weights

        size = len(self.vertices)
        keys = inc.u * size + inc.v
        order = np.lexsort((inc.qubit, weights, keys))
        _, first = np.unique(keys[order], return_index=True)
        best = order[first]

        self._pair_qubit: Dict[Pair, int] = {
            (int(inc.u[e]), int(inc.v[e])): int(inc.qubit[e]) for e in best
        }
        self._graph = csr_matrix(
            (weights[best], (inc.u[best], inc.v[best])), shape=(size, size)
        )

    @property
    def hyperedge_groups(self) -> Dict[int, List[int]]:
        return self.incidence.hyperedge_groups

    @property
    def edge_count(self) -> int:
        return len(self.incidence.qubit)

    def positions(self, sites: Sequence[int]) -> np.ndarray:
        return np.searchsorted(self.vertices, np.asarray(sites, dtype=np.int64))

    def shortest_paths(self, sources: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Distance and predecessor rows for the given vertex positions."""
        missing = sorted({int(s) for s in sources} - self._rows.keys())
        if missing:
            dist, pred = dijkstra(self._graph, directed=False, indices=missing, return_predecessors=True)
            for row, source in enumerate(missing):
                self._rows[source] = (dist[row], pred[row])
        dist = np.array([self._rows[int(s)][0] for s in sources])
        pred = np.array([self._rows[int(s)][1] for s in sources])
        return dist, pred

    def path_qubits(self, source: int, target: int) -> List[int]:
        """Qubits along the cached shortest path between two vertex positions."""
        _, pred = self._rows[source]
        qubits = []
        node = target
        while node != source:
            parent = int(pred[node])
            if parent < 0:
                raise DisconnectedDefect(f"No path between vertices {source} and {target}")
            qubits.append(self._pair_qubit[(min(parent, node), max(parent, node))])
            node = parent
        return qubits


def build_symmetry_graph(
    code: BBCode,
    symmetry: Symmetry,
    qubit_weights: Optional[np.ndarray] = None,
    hyperedge_weighting: Optional[str] = None,
) -> SymmetryGraph:
    """
    Build the symmetry graph of a symmetry.

    Args:
        code: Code the symmetry lives on
        symmetry: Verified symmetry
        qubit_weights: Per-qubit edge weights; unit weights by default
        hyperedge_weighting: 'full' or 'divided'

    Raises:
        OddParity: If some qubit violates an odd number of the symmetry's checks
    """
    weighting = hyperedge_weighting or MATCHING_DEFAULTS["hyperedge-weighting"]
    if weighting not in ('full', 'divided'):
        raise ValueError(f"Unknown hyperedge weighting {weighting!r}")

    vertices = symmetry.sites
    weights = np.ones(code.n) if qubit_weights is None else np.asarray(qubit_weights, dtype=float)
    graph = SymmetryGraph(
        code=code,
        symmetry=symmetry,
        vertices=vertices,
        incidence=_incidence(code, vertices),
        qubit_weights=weights,
        hyperedge_weighting=weighting,
    )
    if graph.hyperedge_groups:
        logger.debug(f"{symmetry}: {len(graph.hyperedge_groups)} hyperedges")
    return graph


def reweight(graph: SymmetryGraph, qubit_weights: np.ndarray) -> SymmetryGraph:
    """Same incidence with new qubit weights and an empty path cache."""
    return SymmetryGraph(
        code=graph.code,
        symmetry=graph.symmetry,
        vertices=graph.vertices,
        incidence=graph.incidence,
        qubit_weights=np.asarray(qubit_weights, dtype=float),
        hyperedge_weighting=graph.hyperedge_weighting,
    )


@dataclass(frozen=True)
class MatchResult:
    pairs: Tuple[Pair, ...]
    qubit_set: np.ndarray
    weight: float
    defects: Tuple[int, ...]


# pairings are compared in whole multiples of this weight
_WEIGHT_QUANTUM = 1e-9


def _quantized(distances: np.ndarray) -> List[List[Optional[int]]]:
    """Integer costs on the weight grid, None where no path exists."""
    return [
        [int(round(d / _WEIGHT_QUANTUM)) if np.isfinite(d) else None for d in row]
        for row in np.asarray(distances, dtype=float)
    ]


def _pair_weight(distances: np.ndarray, pairs: Sequence[Pair]) -> float:
    return float(sum(distances[a, b] for a, b in pairs))


def brute_force_pairing(distances: np.ndarray) -> Optional[Tuple[List[Pair], float]]:
    """
    Exact minimum-weight perfect matching by recursion.

    The first remaining defect is paired with every other one in index
    order; only strictly lighter pairings replace the incumbent, so the
    lexicographically first optimum wins.
    """
    costs = _quantized(distances)
    best: List = [None, None]

    def recurse(remaining: Tuple[int, ...], chosen: List[Pair], total: int):
        if best[1] is not None and total >= best[1]:
            return
        if not remaining:
            best[0], best[1] = list(chosen), total
            return
        first = remaining[0]
        for index in range(1, len(remaining)):
            other = remaining[index]
            cost = costs[first][other]
            if cost is None:
                continue
            chosen.append((first, other))
            recurse(remaining[1:index] + remaining[index + 1:], chosen, total + cost)
            chosen.pop()

    recurse(tuple(range(len(distances))), [], 0)
    if best[0] is None:
        return None
    return best[0], _pair_weight(distances, best[0])


def blossom_pairing(distances: np.ndarray) -> Optional[Tuple[List[Pair], float]]:
    """
    Exact minimum-weight perfect matching with the blossom algorithm.

    Each edge (a, b), a < b, carries its quantized distance scaled by
    K**count plus the rank term b * K**(count - 1 - a), with K = count + 1.
    The rank terms of a whole pairing stay below K**count and order
    equal-weight pairings by the partner of the lowest unpaired defect
    first, so the optimum found is the same lexicographically first one
    that brute_force_pairing returns. All arithmetic is on Python ints.
    """
    count = len(distances)
    costs = _quantized(distances)
    base = count + 1
    scale = base ** count

    edges = []
    for a in range(count):
        for b in range(a + 1, count):
            if costs[a][b] is not None:
                edges.append((a, b, costs[a][b] * scale + b * base ** (count - 1 - a)))
    if not edges:
        return None if count else ([], 0.0)

    # max_weight_matching with maxcardinality on ceiling - w is a min-weight perfect matching
    ceiling = 1 + max(w for _, _, w in edges)
    graph = nx.Graph()
    graph.add_nodes_from(range(count))
    graph.add_weighted_edges_from((a, b, ceiling - w) for a, b, w in edges)

    matching = nx.max_weight_matching(graph, maxcardinality=True)
    if 2 * len(matching) != count:
        return None
    pairs = sorted((min(a, b), max(a, b)) for a, b in matching)
    return pairs, _pair_weight(distances, pairs)


def match(
    graph: SymmetryGraph,
    syndrome,
    brute_force_limit: Optional[int] = None,
) -> MatchResult:
    """
    Pair the symmetry's violated checks and collect the connecting qubits.

    Args:
        graph: Symmetry graph on the matching code
        syndrome: Full syndrome of the matching code
        brute_force_limit: Largest defect count matched by enumeration

    Returns:
        MatchResult whose qubit_set is the XOR of the shortest paths

    Raises:
        OddDefectCount: If the restricted syndrome has odd weight
        DisconnectedDefect: If no perfect matching of finite weight exists
    """
    limit = MATCHING_DEFAULTS["brute-force-defects"] if brute_force_limit is None else brute_force_limit
    bits = as_bits(syndrome, graph.code.sites)
    defects = np.flatnonzero(bits[graph.vertices])
    qubit_set = np.zeros(graph.code.n, dtype=np.uint8)

    if defects.size % 2:
        raise OddDefectCount(f"{defects.size} violated checks of {graph.symmetry}")
    if defects.size == 0:
        return MatchResult(pairs=(), qubit_set=qubit_set, weight=0.0, defects=())

    dist, _ = graph.shortest_paths(defects)
    local = dist[:, defects]

    pairing = brute_force_pairing(local) if defects.size <= limit else blossom_pairing(local)
    if pairing is None:
        raise DisconnectedDefect(f"Defects of {graph.symmetry} cannot be perfectly matched")

    pairs, weight = pairing
    vertex_pairs = []
    for a, b in pairs:
        source, target = int(defects[a]), int(defects[b])
        for q in graph.path_qubits(source, target):
            qubit_set[q] ^= 1
        vertex_pairs.append((int(graph.vertices[source]), int(graph.vertices[target])))

    return MatchResult(
        pairs=tuple(vertex_pairs),
        qubit_set=qubit_set,
        weight=weight,
        defects=tuple(int(graph.vertices[d]) for d in defects),
    )


def commutator_bit(qubit_set, logical) -> int:
    """Parity of the overlap between a qubit set and a Z-type logical."""
    return int(np.count_nonzero(np.asarray(qubit_set, dtype=bool) & np.asarray(logical, dtype=bool)) & 1)

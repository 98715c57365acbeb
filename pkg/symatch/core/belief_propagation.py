"""
Belief Propagation
Min-sum message passing on Tanner graphs with syndrome constraints

Used to reweight symmetry graphs from posteriors, to decode one sublattice
classically, and to study convergence against the iteration cap.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Any, Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from ..config.settings import BP_DEFAULTS, BP_POSTERIOR_FLOOR, MATCHING_DEFAULTS
from .bb_code import BBCode
from .gf2 import BinaryMatrix, as_bits

logger = logging.getLogger(__name__)

# Magnitude used for checks whose other neighbours carry no information
_SATURATED = 1e3


@dataclass(frozen=True)
class BPConfig:
    """Min-sum settings; keys mirror the ldpc package option names."""

    method: str = "minsum"
    max_iters: int = 1000
    ms_scaling_factor: float = 0.0
    prior: Optional[float] = None

    def __post_init__(self):
        if self.method != "minsum":
            raise ValueError(f"Only min-sum is supported, got {self.method!r}")
        if self.max_iters < 1:
            raise ValueError(f"max-iters must be at least 1, got {self.max_iters}")
        if not 0.0 <= self.ms_scaling_factor <= 1.0:
            raise ValueError(f"ms-scaling-factor must lie in [0, 1], got {self.ms_scaling_factor}")
        if self.prior is not None and not 0.0 < self.prior < 1.0:
            raise ValueError(f"prior must lie in (0, 1), got {self.prior}")

    @classmethod
    def from_dict(cls, data: Optional[Mapping[str, Any]] = None) -> 'BPConfig':
        merged = dict(BP_DEFAULTS)
        merged.update(data or {})
        return cls(
            method=merged["bp-method"],
            max_iters=int(merged["max-iters"]),
            ms_scaling_factor=float(merged["ms-scaling-factor"]),
            prior=None if merged["prior"] is None else float(merged["prior"]),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bp-method": self.method,
            "max-iters": self.max_iters,
            "ms-scaling-factor": self.ms_scaling_factor,
            "prior": self.prior,
        }

    def resolve_prior(self, n: int, physical: Optional[float] = None) -> float:
        """Configured prior, else the physical rate, else 3/n."""
        if self.prior is not None:
            return self.prior
        if physical is not None:
            return physical
        return 3.0 / n


class BPResult(NamedTuple):
    converged: bool
    iterations: int
    posteriors: np.ndarray
    hard_decision: np.ndarray


class TannerGraph:
    """Edge list of a check matrix, ordered by check, reused across shots."""

    def __init__(self, matrix: Union[BinaryMatrix, np.ndarray]):
        dense = matrix.to_array() if isinstance(matrix, BinaryMatrix) else np.asarray(matrix, dtype=np.uint8)
        self.dense = dense
        self.checks, self.variables = np.nonzero(dense)
        self.m, self.n = dense.shape
        self.active = np.unique(self.checks)
        self.starts = np.searchsorted(self.checks, self.active)
        self.edge_check = np.searchsorted(self.active, self.checks)
        self.positions = np.arange(len(self.checks))

    def satisfies(self, bits: np.ndarray, syndrome: np.ndarray) -> bool:
        return not (((self.dense @ bits) & 1) ^ syndrome).any()


def _min_sum_update(graph: TannerGraph, v2c: np.ndarray, syndrome: np.ndarray, scale: float) -> np.ndarray:
    magnitude = np.abs(v2c)
    negative = (v2c < 0).astype(np.int64)

    min1 = np.minimum.reduceat(magnitude, graph.starts)
    at_min = magnitude == min1[graph.edge_check]
    first = np.minimum.reduceat(np.where(at_min, graph.positions, len(magnitude)), graph.starts)
    masked = magnitude.copy()
    masked[first] = np.inf
    min2 = np.minimum.reduceat(masked, graph.starts)

    is_first = graph.positions == first[graph.edge_check]
    excluded = np.where(is_first, min2[graph.edge_check], min1[graph.edge_check])
    excluded = np.minimum(excluded, _SATURATED)

    parity = (np.add.reduceat(negative, graph.starts) & 1) ^ syndrome[graph.active]
    sign = 1 - 2 * (parity[graph.edge_check] ^ negative)
    return scale * sign * excluded


def bp_decode(
    matrix: Union[BinaryMatrix, np.ndarray, TannerGraph],
    syndrome,
    config: Optional[BPConfig] = None,
    prior: Optional[float] = None,
) -> BPResult:
    """
    Syndrome min-sum decoding with a flooding schedule.

    Args:
        matrix: Check matrix or a prepared TannerGraph
        syndrome: Target syndrome
        config: BP settings
        prior: Per-bit error probability; overrides config.prior

    Returns:
        BPResult; posteriors are returned even without convergence
    """
    graph = matrix if isinstance(matrix, TannerGraph) else TannerGraph(matrix)
    config = config or BPConfig()
    bits = as_bits(syndrome, graph.m)
    p = prior if prior is not None else config.resolve_prior(graph.n)
    if not 0.0 < p < 1.0:
        raise ValueError(f"Prior must lie in (0, 1), got {p}")

    channel = np.full(graph.n, np.log((1.0 - p) / p))
    llr = channel.copy()
    hard = np.zeros(graph.n, dtype=np.uint8)
    iterations = 0
    converged = graph.satisfies(hard, bits)

    c2v = np.zeros(len(graph.checks))
    while not converged and iterations < config.max_iters:
        iterations += 1
        scale = config.ms_scaling_factor or 1.0 - 2.0 ** (-iterations)
        v2c = llr[graph.variables] - c2v
        c2v = _min_sum_update(graph, v2c, bits, scale)
        llr = channel + np.bincount(graph.variables, weights=c2v, minlength=graph.n)
        hard = (llr < 0).astype(np.uint8)
        converged = graph.satisfies(hard, bits)

    if converged:
        assert graph.satisfies(hard, bits)

    with np.errstate(over='ignore'):
        posteriors = 1.0 / (1.0 + np.exp(llr))
    posteriors = np.clip(posteriors, BP_POSTERIOR_FLOOR, 1.0 - BP_POSTERIOR_FLOOR)
    return BPResult(converged=converged, iterations=iterations, posteriors=posteriors, hard_decision=hard)


def posterior_costs(
    result: Union[BPResult, np.ndarray],
    w_min: Optional[float] = None,
    w_max: Optional[float] = None,
) -> np.ndarray:
    """Edge weights ln((1 - p) / p), clamped to [w_min, w_max]."""
    w_min = MATCHING_DEFAULTS["w-min"] if w_min is None else w_min
    w_max = MATCHING_DEFAULTS["w-max"] if w_max is None else w_max
    posteriors = result.posteriors if isinstance(result, BPResult) else np.asarray(result, dtype=float)
    p = np.clip(posteriors, BP_POSTERIOR_FLOOR, 1.0 - BP_POSTERIOR_FLOOR)
    return np.clip(np.log((1.0 - p) / p), w_min, w_max)


@lru_cache(maxsize=None)
def side_tanner_graph(code: BBCode, side: str) -> TannerGraph:
    if side == 'L':
        return TannerGraph(code.hz_dense[:, :code.sites])
    if side == 'R':
        return TannerGraph(code.hz_dense[:, code.sites:])
    raise ValueError(f"Side must be 'L' or 'R', got {side!r}")


def classical_side_decode(
    code: BBCode,
    side: str,
    syndrome,
    config: Optional[BPConfig] = None,
    prior: Optional[float] = None,
) -> Optional[np.ndarray]:
    """
    Decode assuming every flipped qubit sits on one sublattice.

    The correction is accepted when BP converges with weight below d/2
    (below n when the distance is unknown).

    Returns:
        Full-length side-only correction, or None on rejection
    """
    bits = as_bits(syndrome, code.sites)
    correction = np.zeros(code.n, dtype=np.uint8)
    if not bits.any():
        return correction

    graph = side_tanner_graph(code, side)
    result = bp_decode(graph, bits, config, prior=prior)
    weight = int(result.hard_decision.sum())
    threshold = code.distance / 2 if code.distance else code.n
    if not result.converged or weight >= threshold:
        logger.debug(f"{side}-side decode rejected (converged={result.converged}, weight={weight})")
        return None

    offset = 0 if side == 'L' else code.sites
    correction[offset:offset + code.sites] = result.hard_decision
    return correction


def bp_convergence_study(
    code: BBCode,
    weight: int,
    iteration_caps: Sequence[int],
    config: Optional[BPConfig] = None,
    errors: Optional[Iterable[Sequence[int]]] = None,
    prior: Optional[float] = None,
) -> Dict[int, int]:
    """
    Count errors on which BP fails to converge, for each iteration cap.

    BP stops at the first converging iteration, so one run at the largest
    cap answers every smaller cap.

    Args:
        code: Code whose H_Z is decoded
        weight: Error weight, used when errors is not given
        iteration_caps: Caps to report
        config: BP settings (max_iters is replaced by the largest cap)
        errors: Qubit supports to test; all weight-w supports by default
        prior: Per-qubit prior; 3/n by default

    Returns:
        Mapping cap -> number of non-convergent errors
    """
    caps = sorted(set(int(cap) for cap in iteration_caps))
    base = config or BPConfig()
    run_config = BPConfig(base.method, caps[-1], base.ms_scaling_factor, base.prior)
    graph = TannerGraph(code.hz_dense)
    p = prior if prior is not None else run_config.resolve_prior(code.n)
    supports = errors if errors is not None else combinations(range(code.n), weight)

    counts = {cap: 0 for cap in caps}
    total = 0
    for support in supports:
        error = np.zeros(code.n, dtype=np.uint8)
        error[list(support)] = 1
        result = bp_decode(graph, code.syndrome(error), run_config, prior=p)
        total += 1
        for cap in caps:
            if not result.converged or result.iterations > cap:
                counts[cap] += 1

    logger.info(f"BP convergence study on {code.name}: {total} errors, non-converged {counts}")
    return counts

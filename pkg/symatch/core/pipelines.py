"""
Decoder Pipelines
Symatch, simplex-symatch, BP-augmented, L/R-preprocessed and correlated decoders

A decoder context is built once per code and configuration: cylinder
channels for both directions, the logical frame used to assemble
corrections, symmetry graphs for every needed combination, subsymmetry
bases and the Tanner graph for BP. Decoding a syndrome is then a pure
function of that context.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import (
    CYLINDER_DEFAULTS,
    MATCHING_DEFAULTS,
    PIPELINE_DEFAULTS,
    SYMMETRY_DEFAULTS,
)
from .bb_code import BBCode, SyndromeMismatch
from .belief_propagation import BPConfig, TannerGraph, bp_decode, classical_side_decode, posterior_costs
from .cylinder import DIRECTIONS, LogicalChannel, build_direction_channels, build_logical_frame
from .errors import SymatchError
from .gf2 import as_bits
from .matching import MatchResult, SymmetryGraph, build_symmetry_graph, commutator_bit, match, reweight
from .simplex import SimplexWord, simplex_outer_decode
from .symmetry import Symmetry, TooManySymmetries, discover_subsymmetries

logger = logging.getLogger(__name__)

VARIANTS = (
    'symatch',
    'simplex-symatch',
    'lr-symatch',
    'lr-simplex-symatch',
    'bp-symatch',
    'bp-simplex-symatch',
    'bp-lr-symatch',
    'bp-lr-simplex-symatch',
    'correlated-symatch',
)


class UnknownVariant(SymatchError):
    """Raised when a decoder variant name is not recognised"""
    pass


@dataclass(frozen=True)
class PipelineConfig:
    """Decoder variant and the knobs every stage reads."""

    variant: str = 'symatch'
    bp: Optional[BPConfig] = None
    epsilon: float = 0.5
    bp_shortcut: bool = False
    hyperedge_weighting: str = 'full'
    w_min: float = 1e-3
    w_max: float = 20.0
    brute_force_defects: int = 8
    max_doublings: int = 3
    max_generators: int = 12

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise UnknownVariant(f"Unknown decoder '{self.variant}'. Available: {list(VARIANTS)}")
        if self.uses_bp and self.bp is None:
            object.__setattr__(self, 'bp', BPConfig())
        if not self.uses_bp and self.bp is not None:
            raise ValueError(f"Variant {self.variant} does not run BP; drop the bp settings")
        if self.is_correlated and not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    @property
    def uses_bp(self) -> bool:
        return self.variant.startswith('bp-')

    @property
    def uses_lr(self) -> bool:
        return '-lr-' in f"-{self.variant}"

    @property
    def uses_simplex(self) -> bool:
        return 'simplex' in self.variant or self.is_correlated

    @property
    def is_correlated(self) -> bool:
        return self.variant == 'correlated-symatch'

    @classmethod
    def from_dict(cls, config: Optional[Mapping[str, Any]] = None, variant: Optional[str] = None) -> 'PipelineConfig':
        """
        Build from a configuration dictionary with settings.py sections.

        Args:
            config: Mapping with 'pipeline', 'matching', 'bp', 'cylinder'
                and 'symmetry' sections; missing keys take the defaults
            variant: Overrides pipeline.variant
        """
        config = config or {}
        pipeline = {**PIPELINE_DEFAULTS, **config.get('pipeline', {})}
        matching = {**MATCHING_DEFAULTS, **config.get('matching', {})}
        cylinder = {**CYLINDER_DEFAULTS, **config.get('cylinder', {})}
        symmetry = {**SYMMETRY_DEFAULTS, **config.get('symmetry', {})}
        name = variant or pipeline['variant']
        if name not in VARIANTS:
            raise UnknownVariant(f"Unknown decoder '{name}'. Available: {list(VARIANTS)}")

        return cls(
            variant=name,
            bp=BPConfig.from_dict(config.get('bp')) if name.startswith('bp-') else None,
            epsilon=float(pipeline['epsilon']),
            bp_shortcut=bool(pipeline['bp-shortcut']),
            hyperedge_weighting=matching['hyperedge-weighting'],
            w_min=float(matching['w-min']),
            w_max=float(matching['w-max']),
            brute_force_defects=int(matching['brute-force-defects']),
            max_doublings=int(cylinder['max-doublings']),
            max_generators=int(symmetry['max-generators']),
        )

    def with_variant(self, variant: str) -> 'PipelineConfig':
        bp = (self.bp or BPConfig()) if variant.startswith('bp-') else None
        return replace(self, variant=variant, bp=bp)


@dataclass
class DecodeOutcome:
    """
    Correction and the logical bits that produced it.

    bits holds the decoded generator bits per direction; words holds the raw
    simplex words when over-matching ran. flags, failed and
    direction_failures are filled by evaluate when the true error is known.
    """

    correction: np.ndarray
    method: str
    bits: Dict[str, np.ndarray] = field(default_factory=dict)
    words: Dict[str, SimplexWord] = field(default_factory=dict)
    flags: Optional[np.ndarray] = None
    failed: Optional[bool] = None
    direction_failures: Dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'correction': np.flatnonzero(self.correction).tolist(),
            'bits': {d: b.tolist() for d, b in self.bits.items()},
            'failed': self.failed,
            'direction_failures': dict(self.direction_failures),
        }


@dataclass(frozen=True)
class Combination:
    """Sum of the generator channels selected by v, on the direction's matching code."""

    selector: int
    symmetry: Symmetry
    logical: np.ndarray
    base_logical: np.ndarray


class SymatchDecoder:
    """
    Decoder context for one code and configuration.

    Safe to share between threads once built; each worker process builds
    its own copy.
    """

    def __init__(self, code: BBCode, config: Optional[PipelineConfig] = None):
        self.logger = logging.getLogger(__name__)
        self.code = code
        self.config = config or PipelineConfig()

        self.channels: Dict[str, List[LogicalChannel]] = {
            direction: build_direction_channels(code, direction, self.config.max_doublings)
            for direction in DIRECTIONS
        }
        self.frame = build_logical_frame(code, self.channels)

        if self.config.uses_simplex:
            for direction in DIRECTIONS:
                count = self.generator_count(direction)
                if count > self.config.max_generators:
                    raise TooManySymmetries(
                        f"{count} {direction} generators exceed the cap of {self.config.max_generators}"
                    )

        self._combinations: Dict[Tuple[str, int], Combination] = {}
        self._graphs: Dict[Tuple[str, int], SymmetryGraph] = {}
        self._subsymmetries: Dict[str, np.ndarray] = {}
        self._tanner: Optional[TannerGraph] = None

        self.logger.info(
            f"Decoder context for {code.name} ({self.config.variant}): "
            f"{self.generator_count('vertical')} vertical, "
            f"{self.generator_count('horizontal')} horizontal generators"
        )

    # ------------------------------------------------------------------
    # Context pieces
    # ------------------------------------------------------------------

    def generator_count(self, direction: str) -> int:
        return len(self.channels[direction])

    def selectors(self, direction: str, over_match: bool) -> List[int]:
        count = self.generator_count(direction)
        if over_match:
            return list(range(1, 1 << count))
        return [1 << j for j in range(count)]

    def combination(self, direction: str, selector: int) -> Combination:
        key = (direction, selector)
        if key not in self._combinations:
            chosen = [c for j, c in enumerate(self.channels[direction]) if selector >> j & 1]
            symmetry = chosen[0].symmetry
            logical = chosen[0].logical.copy()
            base_logical = chosen[0].base_logical.copy()
            for channel in chosen[1:]:
                symmetry = symmetry + channel.symmetry
                logical ^= channel.logical
                base_logical ^= channel.base_logical
            self._combinations[key] = Combination(selector, symmetry, logical, base_logical)
        return self._combinations[key]

    def graph(self, direction: str, selector: int) -> SymmetryGraph:
        """Unit-weight symmetry graph, built once and kept with its path cache."""
        key = (direction, selector)
        if key not in self._graphs:
            context = self.channels[direction][0].context
            self._graphs[key] = build_symmetry_graph(
                context.code,
                self.combination(direction, selector).symmetry,
                hyperedge_weighting=self.config.hyperedge_weighting,
            )
        return self._graphs[key]

    def subsymmetry_matrix(self, side: str) -> np.ndarray:
        if side not in self._subsymmetries:
            rows = [s.site_vector for s in discover_subsymmetries(self.code, side)]
            self._subsymmetries[side] = (
                np.array(rows, dtype=np.uint8) if rows else np.zeros((0, self.code.sites), dtype=np.uint8)
            )
        return self._subsymmetries[side]

    @property
    def tanner(self) -> TannerGraph:
        if self._tanner is None:
            self._tanner = TannerGraph(self.code.hz_dense)
        return self._tanner

    # ------------------------------------------------------------------
    # Matching stages
    # ------------------------------------------------------------------

    def match_direction(
        self,
        direction: str,
        syndrome: np.ndarray,
        selectors: Sequence[int],
        base_weights: Optional[np.ndarray] = None,
        graph_weights: Optional[Mapping[int, np.ndarray]] = None,
    ) -> Dict[int, MatchResult]:
        """
        Match every selected combination of one direction.

        Args:
            direction: 'vertical' or 'horizontal'
            syndrome: Base-code syndrome
            selectors: Combinations to match
            base_weights: Base-qubit weights shared by every graph
            graph_weights: Base-qubit weights per selector, overriding base_weights
        """
        if not selectors:
            return {}
        context = self.channels[direction][0].context
        lifted = context.duplicate(syndrome)

        results = {}
        for selector in selectors:
            graph = self.graph(direction, selector)
            weights = graph_weights.get(selector) if graph_weights else None
            weights = base_weights if weights is None else weights
            if weights is not None:
                graph = reweight(graph, weights[context.qubit_fold])
            results[selector] = match(graph, lifted, self.config.brute_force_defects)
        return results

    def commutator_bits(self, direction: str, matches: Mapping[int, MatchResult]) -> Dict[int, int]:
        return {
            selector: commutator_bit(result.qubit_set, self.combination(direction, selector).logical)
            for selector, result in matches.items()
        }

    def simplex_encode_and_match(
        self,
        syndrome,
        base_weights: Optional[np.ndarray] = None,
        graph_weights: Optional[Mapping[Tuple[str, int], np.ndarray]] = None,
    ) -> Dict[str, SimplexWord]:
        """Match all 2^K - 1 combinations per direction and collect their bits."""
        bits = as_bits(syndrome, self.code.sites)
        words = {}
        for direction in DIRECTIONS:
            selectors = self.selectors(direction, over_match=True)
            per_graph = (
                {v: graph_weights[(direction, v)] for v in selectors} if graph_weights else None
            )
            matches = self.match_direction(direction, bits, selectors, base_weights, per_graph)
            words[direction] = SimplexWord.from_mapping(
                self.generator_count(direction), self.commutator_bits(direction, matches)
            )
        return words

    # ------------------------------------------------------------------
    # Assembly
    # ------------------------------------------------------------------

    def assemble(self, syndrome: np.ndarray, bits: Mapping[str, np.ndarray]) -> np.ndarray:
        """
        C = C' + sum_i (b_i + C'.f_i) X*_i over the logical frame.

        The result has syndrome s and commutator b_i with every frame logical f_i.
        """
        correction = self.code.initial_correction(syndrome)
        if not self.frame.keys:
            return correction

        targets = np.array([bits[direction][index] for direction, index in self.frame.keys], dtype=np.uint8)
        current = (self.frame.logicals.astype(np.int64) @ correction) & 1
        flips = (targets ^ current.astype(np.uint8)).astype(bool)
        if flips.any():
            correction = correction ^ (np.bitwise_xor.reduce(self.frame.duals[flips], axis=0))
        return correction.astype(np.uint8)

    def _finish(self, syndrome: np.ndarray, outcome: DecodeOutcome, error=None) -> DecodeOutcome:
        if (self.code.syndrome(outcome.correction) ^ syndrome).any():
            raise SyndromeMismatch(f"{outcome.method} correction does not reproduce the syndrome")
        if error is not None:
            self.evaluate(outcome, error)
        return outcome

    def evaluate(self, outcome: DecodeOutcome, error) -> DecodeOutcome:
        """Fill per-logical and per-direction failure flags against the true error."""
        residual = as_bits(error, self.code.n) ^ outcome.correction
        verdict = self.code.is_logical_failure(error, outcome.correction)
        outcome.flags = verdict.flags
        outcome.failed = verdict.failed
        for direction in DIRECTIONS:
            logicals = [c.base_logical for c in self.channels[direction]]
            outcome.direction_failures[direction] = bool(
                logicals and ((np.array(logicals, dtype=np.int64) @ residual) & 1).any()
            )
        return outcome

    # ------------------------------------------------------------------
    # Pipelines
    # ------------------------------------------------------------------

    def symatch_decode(self, syndrome, base_weights: Optional[np.ndarray] = None, error=None) -> DecodeOutcome:
        """Match the K generator symmetries of each direction and assemble."""
        bits = as_bits(syndrome, self.code.sites)
        decoded = {}
        for direction in DIRECTIONS:
            selectors = self.selectors(direction, over_match=False)
            matches = self.match_direction(direction, bits, selectors, base_weights)
            values = self.commutator_bits(direction, matches)
            decoded[direction] = np.array([values[v] for v in selectors], dtype=np.uint8)

        outcome = DecodeOutcome(correction=self.assemble(bits, decoded), method='symatch', bits=decoded)
        return self._finish(bits, outcome, error)

    def simplex_symatch_decode(
        self,
        syndrome,
        base_weights: Optional[np.ndarray] = None,
        graph_weights: Optional[Mapping[Tuple[str, int], np.ndarray]] = None,
        error=None,
        method: str = 'simplex-symatch',
    ) -> DecodeOutcome:
        bits = as_bits(syndrome, self.code.sites)
        words = self.simplex_encode_and_match(bits, base_weights, graph_weights)
        decoded = {direction: simplex_outer_decode(word) for direction, word in words.items()}
        outcome = DecodeOutcome(
            correction=self.assemble(bits, decoded), method=method, bits=decoded, words=words,
        )
        return self._finish(bits, outcome, error)

    def lr_preprocess(self, syndrome, physical_p: Optional[float] = None) -> Optional[DecodeOutcome]:
        """
        Try a one-sublattice classical decode before matching.

        Side L is tried when every L-subsymmetry parity is even; side R is
        tried when side L was not applicable or was rejected and every
        R-subsymmetry parity is even.

        Returns:
            Accepted outcome, or None to fall through to matching
        """
        bits = as_bits(syndrome, self.code.sites)
        bp_config = self.config.bp or BPConfig()
        prior = bp_config.resolve_prior(self.code.n, physical_p)
        for side in ('L', 'R'):
            parities = (self.subsymmetry_matrix(side).astype(np.int64) @ bits) & 1
            if parities.any():
                continue
            correction = classical_side_decode(self.code, side, bits, bp_config, prior=prior)
            if correction is not None:
                return DecodeOutcome(correction=correction, method=f'lr-{side}')
        return None

    def round_one_weights(self, syndrome) -> Dict[Tuple[str, int], np.ndarray]:
        """
        Base-qubit weights for every combination graph after a unit-weight round.

        Each qubit loses epsilon for every other symmetry whose round-one
        matching used it, down to w_min.
        """
        bits = as_bits(syndrome, self.code.sites)
        memberships: Dict[Tuple[str, int], np.ndarray] = {}
        for direction in DIRECTIONS:
            selectors = self.selectors(direction, over_match=True)
            if not selectors:
                continue
            fold = self.channels[direction][0].context.qubit_fold
            for selector, result in self.match_direction(direction, bits, selectors).items():
                used = np.bincount(fold, weights=result.qubit_set, minlength=self.code.n) > 0
                memberships[(direction, selector)] = used.astype(np.int64)

        total = sum(memberships.values()) if memberships else np.zeros(self.code.n, dtype=np.int64)
        return {
            key: np.maximum(self.config.w_min, 1.0 - self.config.epsilon * (total - used))
            for key, used in memberships.items()
        }

    def correlated_symatch(self, syndrome, error=None) -> DecodeOutcome:
        """Two matching rounds sharing matched qubits, then the simplex outer decode."""
        bits = as_bits(syndrome, self.code.sites)
        weights = self.round_one_weights(bits)
        return self.simplex_symatch_decode(
            bits, graph_weights=weights, error=error, method='correlated-symatch',
        )

    def decode(self, syndrome, error=None, physical_p: Optional[float] = None) -> DecodeOutcome:
        """
        Dispatch on the configured variant.

        Args:
            syndrome: Base-code syndrome
            error: True error, when failure flags are wanted
            physical_p: Physical error rate, used as the BP prior when the
                configuration does not fix one
        """
        bits = as_bits(syndrome, self.code.sites)
        config = self.config

        if config.is_correlated:
            return self.correlated_symatch(bits, error)

        if config.uses_lr:
            accepted = self.lr_preprocess(bits, physical_p)
            if accepted is not None:
                return self._finish(bits, accepted, error)

        base_weights = None
        if config.uses_bp:
            prior = config.bp.resolve_prior(self.code.n, physical_p)
            result = bp_decode(self.tanner, bits, config.bp, prior=prior)
            if result.converged and config.bp_shortcut:
                return self._finish(bits, DecodeOutcome(correction=result.hard_decision, method='bp'), error)
            base_weights = posterior_costs(result, config.w_min, config.w_max)

        if config.uses_simplex:
            return self.simplex_symatch_decode(bits, base_weights, error=error, method=config.variant)

        outcome = self.symatch_decode(bits, base_weights, error)
        outcome.method = config.variant
        return outcome


class DecoderFactory:
    """
    Factory for decoder contexts.

    Contexts are cached per (code, configuration) since building the
    channels and graphs dominates the cost of a single decode.
    """

    _variants: Dict[str, str] = {
        'symatch': "Symmetry matching",
        'simplex-symatch': "Simplex over-matching",
        'lr-symatch': "L/R pre-decoding, then matching",
        'lr-simplex-symatch': "L/R pre-decoding, then simplex over-matching",
        'bp-symatch': "BP-reweighted matching",
        'bp-simplex-symatch': "BP-reweighted simplex over-matching",
        'bp-lr-symatch': "L/R pre-decoding, then BP-reweighted matching",
        'bp-lr-simplex-symatch': "L/R pre-decoding, then BP-reweighted simplex over-matching",
        'correlated-symatch': "Correlated two-round simplex over-matching",
    }

    @classmethod
    def get_available_decoders(cls) -> Dict[str, str]:
        return dict(cls._variants)

    @classmethod
    def is_decoder_available(cls, variant: str) -> bool:
        return variant in cls._variants

    @classmethod
    def create_decoder(cls, code: BBCode, config=None) -> SymatchDecoder:
        """
        Create (or reuse) a decoder context.

        Args:
            code: Code to decode
            config: PipelineConfig, a variant name, or None for the defaults

        Raises:
            UnknownVariant: If the variant is not supported
        """
        if isinstance(config, str):
            if config not in cls._variants:
                raise UnknownVariant(f"Unknown decoder '{config}'. Available: {list(cls._variants)}")
            config = PipelineConfig(variant=config)
        return _cached_decoder(code, config or PipelineConfig())


@lru_cache(maxsize=32)
def _cached_decoder(code: BBCode, config: PipelineConfig) -> SymatchDecoder:
    return SymatchDecoder(code, config)


def _decoder(code: BBCode, config: Optional[PipelineConfig], variant: str) -> SymatchDecoder:
    config = config.with_variant(variant) if config is not None else PipelineConfig(variant=variant)
    return DecoderFactory.create_decoder(code, config)


def symatch_decode(code: BBCode, syndrome, config: Optional[PipelineConfig] = None, error=None) -> DecodeOutcome:
    return _decoder(code, config, 'symatch').symatch_decode(syndrome, error=error)


def simplex_encode_and_match(code: BBCode, syndrome, config: Optional[PipelineConfig] = None) -> Dict[str, SimplexWord]:
    return _decoder(code, config, 'simplex-symatch').simplex_encode_and_match(syndrome)


def lr_preprocess(code: BBCode, syndrome, config: Optional[PipelineConfig] = None) -> Optional[DecodeOutcome]:
    return _decoder(code, config, 'lr-symatch').lr_preprocess(syndrome)


def correlated_symatch(code: BBCode, syndrome, config: Optional[PipelineConfig] = None, error=None) -> DecodeOutcome:
    return _decoder(code, config, 'correlated-symatch').correlated_symatch(syndrome, error)


def decode(code: BBCode, syndrome, config: Optional[PipelineConfig] = None, error=None,
           physical_p: Optional[float] = None) -> DecodeOutcome:
    decoder = DecoderFactory.create_decoder(code, config or PipelineConfig())
    return decoder.decode(syndrome, error=error, physical_p=physical_p)

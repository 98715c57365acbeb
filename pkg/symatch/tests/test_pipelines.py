from itertools import combinations

import numpy as np
import pytest

from symatch import SUPPORTED_DECODERS
from symatch.core.belief_propagation import BPConfig
from symatch.core.pipelines import (
    VARIANTS,
    DecodeOutcome,
    DecoderFactory,
    PipelineConfig,
    SymatchDecoder,
    UnknownVariant,
    correlated_symatch,
    decode,
    lr_preprocess,
    simplex_encode_and_match,
    symatch_decode,
)
from symatch.core.registry import CodeRegistry
from symatch.core.symmetry import TooManySymmetries


def _flip(n, qubits):
    error = np.zeros(n, dtype=np.uint8)
    error[list(qubits)] = 1
    return error


def _uncorrected(code, variant, weight):
    """Errors of the given weight that the variant fails to correct."""
    decoder = DecoderFactory.create_decoder(code, variant)
    failures = []
    for qubits in combinations(range(code.n), weight):
        error = _flip(code.n, qubits)
        outcome = decoder.decode(code.syndrome(error), error=error)
        if outcome.failed:
            failures.append(qubits)
    return failures


def test_config_validation():
    with pytest.raises(UnknownVariant):
        PipelineConfig(variant='union-find')
    with pytest.raises(ValueError):
        PipelineConfig(variant='symatch', bp=BPConfig())
    with pytest.raises(ValueError):
        PipelineConfig(variant='correlated-symatch', epsilon=1.0)
    assert PipelineConfig(variant='bp-symatch').bp == BPConfig()


def test_config_flags():
    assert PipelineConfig(variant='lr-symatch').uses_lr
    assert PipelineConfig(variant='bp-lr-simplex-symatch').uses_lr
    assert not PipelineConfig(variant='simplex-symatch').uses_lr
    assert PipelineConfig(variant='correlated-symatch').uses_simplex
    assert not PipelineConfig().uses_bp


def test_config_from_dict():
    config = PipelineConfig.from_dict({
        'pipeline': {'variant': 'bp-simplex-symatch', 'bp-shortcut': True},
        'matching': {'w-min': 0.01},
        'bp': {'max-iters': 40},
    })
    assert config.variant == 'bp-simplex-symatch'
    assert config.bp_shortcut and config.w_min == 0.01
    assert config.bp.max_iters == 40

    assert PipelineConfig.from_dict(None, variant='lr-symatch').variant == 'lr-symatch'
    with pytest.raises(UnknownVariant):
        PipelineConfig.from_dict({}, variant='mwpm')


def test_with_variant_adds_and_drops_bp():
    config = PipelineConfig().with_variant('bp-symatch')
    assert config.bp is not None
    assert config.with_variant('symatch').bp is None


def test_factory():
    assert set(DecoderFactory.get_available_decoders()) == set(VARIANTS)
    assert SUPPORTED_DECODERS == list(VARIANTS)
    assert DecoderFactory.is_decoder_available('correlated-symatch')
    assert not DecoderFactory.is_decoder_available('mwpm')


def test_factory_caches_contexts(toric4):
    first = DecoderFactory.create_decoder(toric4, 'symatch')
    assert DecoderFactory.create_decoder(toric4, PipelineConfig()) is first
    with pytest.raises(UnknownVariant):
        DecoderFactory.create_decoder(toric4, 'mwpm')


@pytest.mark.parametrize("variant", VARIANTS)
def test_corrections_reproduce_the_syndrome(toric6, variant, rng):
    decoder = DecoderFactory.create_decoder(toric6, variant)
    for _ in range(10):
        error = (rng.random(toric6.n) < 0.04).astype(np.uint8)
        syndrome = toric6.syndrome(error)
        outcome = decoder.decode(syndrome, error=error)
        assert np.array_equal(toric6.syndrome(outcome.correction), syndrome)
        assert outcome.failed is not None


@pytest.mark.parametrize("variant", VARIANTS)
def test_zero_syndrome_gives_no_correction(toric4, variant):
    outcome = DecoderFactory.create_decoder(toric4, variant).decode(np.zeros(toric4.sites, dtype=np.uint8))
    assert not outcome.correction.any()


@pytest.mark.parametrize("variant", VARIANTS)
def test_single_errors_on_toric4(toric4, variant):
    assert _uncorrected(toric4, variant, 1) == []


@pytest.mark.parametrize("variant", ['symatch', 'simplex-symatch', 'correlated-symatch'])
def test_up_to_two_errors_on_toric6(toric6, variant):
    assert _uncorrected(toric6, variant, 1) == []
    assert _uncorrected(toric6, variant, 2) == []


def test_logical_error_is_reported(toric4):
    error = toric4.logical_basis().x.row(0)
    outcome = symatch_decode(toric4, toric4.syndrome(error), error=error)
    assert not outcome.correction.any()
    assert outcome.failed
    assert any(outcome.direction_failures.values())


def test_assembly_honours_requested_bits(toric4):
    decoder = DecoderFactory.create_decoder(toric4, 'symatch')
    syndrome = np.zeros(toric4.sites, dtype=np.uint8)
    correction = decoder.assemble(syndrome, {'vertical': np.array([1]), 'horizontal': np.array([0])})
    assert not toric4.syndrome(correction).any()
    assert (decoder.frame.logicals.astype(int) @ correction % 2).tolist() == [1, 0]


def test_simplex_words_have_one_bit_per_combination(toric4):
    error = _flip(toric4.n, [3])
    words = simplex_encode_and_match(toric4, toric4.syndrome(error))
    assert set(words) == {'vertical', 'horizontal'}
    assert all(word.K == 1 and word.length == 2 for word in words.values())


def test_lr_preprocess_takes_one_sided_errors(toric4):
    for qubit, side in [(5, 'lr-L'), (toric4.sites + 5, 'lr-R')]:
        error = _flip(toric4.n, [qubit])
        outcome = lr_preprocess(toric4, toric4.syndrome(error))
        assert outcome is not None and outcome.method == side
        assert np.array_equal(outcome.correction, error)


def test_lr_preprocess_falls_through_on_mixed_errors(toric4):
    shape = toric4.shape
    # one L and one R flip at distant sites leave odd parities on both sides
    error = _flip(toric4.n, [shape.index(0, 0), toric4.sites + shape.index(2, 2)])
    assert lr_preprocess(toric4, toric4.syndrome(error)) is None
    outcome = decode(toric4, toric4.syndrome(error), PipelineConfig(variant='lr-symatch'), error=error)
    assert outcome.method == 'lr-symatch'


def test_round_one_weights_penalise_shared_qubits(toric4):
    decoder = DecoderFactory.create_decoder(toric4, 'correlated-symatch')
    error = _flip(toric4.n, [toric4.sites + 6])
    weights = decoder.round_one_weights(toric4.syndrome(error))
    assert set(weights) == {('vertical', 1), ('horizontal', 1)}
    for w in weights.values():
        assert w.min() >= decoder.config.w_min
        assert w.max() == 1.0
    # both round-one matchings use the flipped qubit
    assert all(w[toric4.sites + 6] == 0.5 for w in weights.values())


def test_correlated_decode(toric4):
    error = _flip(toric4.n, [2])
    outcome = correlated_symatch(toric4, toric4.syndrome(error), error=error)
    assert outcome.method == 'correlated-symatch'
    assert not outcome.failed


def test_bp_shortcut_returns_bp_decision(toric4):
    config = PipelineConfig(variant='bp-symatch', bp_shortcut=True)
    error = _flip(toric4.n, [7])
    outcome = decode(toric4, toric4.syndrome(error), config, error=error)
    assert outcome.method == 'bp'
    assert not outcome.failed


def test_outcome_to_dict(toric4):
    error = _flip(toric4.n, [1])
    outcome = symatch_decode(toric4, toric4.syndrome(error), error=error)
    record = outcome.to_dict()
    assert record['method'] == 'symatch'
    assert record['correction'] == np.flatnonzero(outcome.correction).tolist()
    assert record['failed'] is False
    assert isinstance(DecodeOutcome(np.zeros(2, dtype=np.uint8), 'x').to_dict()['bits'], dict)


def test_simplex_generator_cap(gross):
    with pytest.raises(TooManySymmetries):
        SymatchDecoder(gross, PipelineConfig(variant='simplex-symatch', max_generators=1))


@pytest.mark.slow
def test_single_errors_on_d36(d36):
    assert _uncorrected(d36, 'symatch', 1) == []


@pytest.mark.slow
def test_up_to_two_errors_on_lc162():
    code = CodeRegistry.create_code('LC162')
    assert _uncorrected(code, 'symatch', 1) == []
    assert _uncorrected(code, 'symatch', 2) == []


@pytest.mark.slow
def test_gross_single_errors(gross):
    for variant in ('symatch', 'simplex-symatch'):
        assert _uncorrected(gross, variant, 1) == []


def _direction_tallies(code, variant, weight):
    decoder = DecoderFactory.create_decoder(code, variant)
    tallies = {'vertical': 0, 'horizontal': 0}
    for qubits in combinations(range(code.n), weight):
        error = _flip(code.n, qubits)
        outcome = decoder.decode(code.syndrome(error), error=error)
        for direction in tallies:
            tallies[direction] += outcome.direction_failures[direction]
    return tallies


@pytest.mark.slow
def test_gross_weight_two_tallies(gross):
    # within a factor of two of the reference tallies of 81 and 296
    tallies = _direction_tallies(gross, 'symatch', 2)
    assert 40 <= tallies['vertical'] <= 162
    assert 148 <= tallies['horizontal'] <= 592


@pytest.mark.slow
def test_gross_weight_two_simplex_tallies(gross):
    tallies = _direction_tallies(gross, 'simplex-symatch', 2)
    assert 5 <= tallies['vertical'] <= 20
    assert tallies['horizontal'] <= 2


@pytest.mark.slow
@pytest.mark.parametrize("variant", ['bp-symatch', 'bp-simplex-symatch', 'bp-lr-symatch', 'bp-lr-simplex-symatch'])
def test_gross_weight_two_with_bp(gross, variant):
    assert _uncorrected(gross, variant, 2) == []

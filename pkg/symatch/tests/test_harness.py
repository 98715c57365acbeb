from itertools import combinations

import numpy as np
import pytest

from symatch.core.harness import (
    BudgetExceeded,
    ExhaustRecord,
    ExhaustSpec,
    SweepConfigError,
    SweepSpec,
    combinations_from,
    run_exhaustive,
    run_sweep,
    sample_error,
    shot_rng,
    unrank_combination,
)
from symatch.utils.file_utils import emit_results, load_results

SMALL_CHUNKS = {'bench': {'chunk-size': 16}}


def test_sample_error_extremes(rng):
    assert not sample_error(50, 0.0, rng).any()
    assert sample_error(50, 1.0, rng).all()
    assert sample_error(50, 0.3, rng).dtype == np.uint8
    with pytest.raises(ValueError):
        sample_error(50, 1.5, rng)


def test_shot_rng_is_keyed_by_position():
    first = shot_rng(7, 1, 42).random(5)
    assert np.array_equal(first, shot_rng(7, 1, 42).random(5))
    assert not np.array_equal(first, shot_rng(7, 1, 43).random(5))
    assert not np.array_equal(first, shot_rng(7, 2, 42).random(5))


@pytest.mark.parametrize("kwargs", [
    dict(shots=0),
    dict(rates=()),
    dict(rates=(0.5,)),
    dict(rates=(-0.1,)),
    dict(counting='per-shot'),
    dict(decoder='mwpm'),
])
def test_sweep_spec_validation(kwargs):
    values = dict(code='TC4', decoder='symatch', rates=(0.01,), shots=10)
    values.update(kwargs)
    with pytest.raises(SweepConfigError):
        SweepSpec(**values)


def test_exhaust_spec_validation():
    with pytest.raises(SweepConfigError):
        ExhaustSpec('TC4', 'symatch', -1)
    with pytest.raises(SweepConfigError):
        ExhaustSpec('TC4', 'symatch', 1, tally='diagonal')


def test_zero_rate_never_fails():
    result = run_sweep(SweepSpec('TC4', 'symatch', (0.0,), shots=20), workers=1)
    (point,) = result.records
    assert point.failures == 0 and point.LER == 0.0 and point.stderr == 0.0
    assert point.logical_failures == [0, 0]


def test_sweep_records_every_rate():
    result = run_sweep(SweepSpec('TC4', 'symatch', (0.02, 0.05, 0.1), shots=30, seed=3), SMALL_CHUNKS, workers=1)
    assert [point.p for point in result.records] == [0.02, 0.05, 0.1]
    assert all(point.shots == 30 for point in result.records)
    assert all(point.failures <= 30 for point in result.records)


def test_sweep_is_independent_of_worker_count():
    spec = SweepSpec('TC4', 'simplex-symatch', (0.08, 0.15), shots=48, seed=11)
    serial = run_sweep(spec, SMALL_CHUNKS, workers=1)
    parallel = run_sweep(spec, SMALL_CHUNKS, workers=2)
    assert [p.to_dict() for p in serial.records] == [p.to_dict() for p in parallel.records]

    other_chunks = run_sweep(spec, {'bench': {'chunk-size': 5}}, workers=1)
    assert [p.failures for p in other_chunks.records] == [p.failures for p in serial.records]


def test_per_logical_counting():
    spec = SweepSpec('TC4', 'symatch', (0.2,), shots=40, seed=5, counting='per-logical')
    (point,) = run_sweep(spec, workers=1).records
    assert point.LER == pytest.approx(sum(point.logical_failures) / (40 * 2))
    assert max(point.logical_failures) <= point.failures <= sum(point.logical_failures)


def test_weight_zero_enumeration():
    (record,) = run_exhaustive(ExhaustSpec('TC4', 'symatch', 0), workers=1).records
    assert record.patterns == 1
    assert record.any_logical == 0


def test_single_flips_on_toric_are_corrected():
    result = run_exhaustive(ExhaustSpec('TC4', 'symatch', 1), SMALL_CHUNKS, workers=1)
    (record,) = result.records
    assert record.patterns == 32
    assert (record.vertical, record.horizontal, record.any_logical) == (0, 0, 0)


def test_budget_is_enforced():
    config = {'bench': {'exhaustive-budget': 100, 'chunk-size': 200}}
    with pytest.raises(BudgetExceeded):
        run_exhaustive(ExhaustSpec('TC4', 'symatch', 2), config, workers=1)
    (record,) = run_exhaustive(ExhaustSpec('TC4', 'symatch', 2), config, workers=1, extended=True).records
    assert record.patterns == 496


def test_tally_selects_the_headline_count():
    config = {'bench': {'chunk-size': 100}}
    result = run_exhaustive(ExhaustSpec('TC4', 'symatch', 2, tally='vertical'), config, workers=1)
    (record,) = result.records
    assert record.tally == 'vertical' and record.failures == record.vertical
    assert result.to_document()['records'][0]['failures'] == record.vertical


def test_unranked_chunks_cover_every_pattern():
    expected = list(combinations(range(9), 4))
    assert [unrank_combination(9, 4, rank) for rank in range(len(expected))] == expected
    assert list(combinations_from(9, 4, 0)) == expected
    assert list(combinations_from(9, 4, 57)) == expected[57:]
    assert list(combinations_from(9, 4, len(expected))) == []
    assert list(combinations_from(5, 0, 0)) == [()]
    with pytest.raises(ValueError):
        unrank_combination(9, 4, len(expected))


def test_exhaust_record_fractions():
    record = ExhaustRecord(weight=2, patterns=200, vertical=10, horizontal=30, any_logical=35)
    assert record.vertical_fraction == 0.05
    assert record.failures == 35
    horizontal = ExhaustRecord(weight=2, patterns=200, vertical=10, horizontal=30, any_logical=35, tally='horizontal')
    assert horizontal.failures == 30
    assert horizontal.to_dict()['failure_fraction'] == 0.15
    assert ExhaustRecord(0, 0, 0, 0, 0).any_fraction == 0.0
    assert record.to_dict()['horizontal_fraction'] == 0.15


def test_documents_round_trip_through_files(tmp_path):
    result = run_sweep(SweepSpec('TC4', 'symatch', (0.05, 0.1), shots=10, seed=2), workers=1)
    document = result.to_document()
    assert document['kind'] == 'sweep' and document['seed'] == 2
    assert 'symatch_version' in document['provenance']

    loaded = load_results(emit_results(document, tmp_path / "sweep.json"))
    assert loaded['records'] == document['records']
    rows = load_results(emit_results(document, tmp_path / "sweep.csv"))['records']
    assert len(rows) == 2
    assert rows[1]['p'] == 0.1


@pytest.mark.slow
def test_larger_toric_code_does_better():
    rates = (0.03,)
    small = run_sweep(SweepSpec('TC4', 'symatch', rates, shots=20_000, seed=1)).records[0]
    large = run_sweep(SweepSpec('TC8', 'symatch', rates, shots=20_000, seed=1)).records[0]
    assert large.LER < small.LER


@pytest.mark.slow
def test_gross_decoder_ordering():
    rates = (0.04,)

    def point(decoder):
        return run_sweep(SweepSpec('gross', decoder, rates, shots=2000, seed=17)).records[0]

    def at_most(better, worse):
        return better.LER <= worse.LER + 2 * np.hypot(better.stderr, worse.stderr)

    symatch, bp, bp_simplex = point('symatch'), point('bp-symatch'), point('bp-simplex-symatch')
    assert at_most(bp_simplex, bp) and at_most(bp, symatch)
    assert at_most(point('correlated-symatch'), point('simplex-symatch'))

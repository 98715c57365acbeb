from itertools import combinations

import numpy as np
import pytest

from symatch.core.simplex import (
    SimplexWord,
    brute_force_nearest_codeword,
    check_supports,
    codeword_table,
    simplex_outer_decode,
)


def test_codewords_are_generator_parities():
    table = codeword_table(3)
    # g = 0b101 selects generators 0 and 2
    assert table[5].tolist() == [0, 1, 0, 1, 1, 0, 1, 0]
    assert not table[:, 0].any()


@pytest.mark.parametrize("K", [1, 2, 3, 4, 5])
def test_check_count(K):
    assert len(check_supports(K)) == (1 << K) - K - 1


def test_checks_vanish_exactly_on_codewords():
    K = 3
    for g in range(1 << K):
        assert SimplexWord(K, codeword_table(K)[g]).is_codeword()
    word = SimplexWord.from_generator_bits([1, 0, 1])
    word.bits[3] ^= 1
    assert not word.is_codeword()


def test_generator_bits_round_trip():
    word = SimplexWord.from_generator_bits([0, 1, 1, 0])
    assert word.K == 4 and word.length == 15
    assert word.generator_bits.tolist() == [0, 1, 1, 0]


def test_from_mapping_ignores_selector_zero():
    word = SimplexWord.from_mapping(2, {0: 1, 1: 1, 3: 1})
    assert word.bits.tolist() == [0, 1, 0, 1]


def test_word_length_is_checked():
    with pytest.raises(ValueError):
        SimplexWord(3, np.zeros(7, dtype=np.uint8))


def test_trivial_sizes():
    assert simplex_outer_decode(SimplexWord(0, np.zeros(1, dtype=np.uint8))).size == 0
    assert simplex_outer_decode(SimplexWord(1, [0, 1])).tolist() == [1]
    assert simplex_outer_decode(SimplexWord(1, [0, 0])).tolist() == [0]


@pytest.mark.parametrize("K", [2, 3, 4])
def test_every_word_matches_brute_force(K):
    length = 1 << K
    for value in range(1 << (length - 1)):
        bits = np.array([0] + [value >> i & 1 for i in range(length - 1)], dtype=np.uint8)
        word = SimplexWord(K, bits)
        assert simplex_outer_decode(word).tolist() == brute_force_nearest_codeword(word).tolist()


@pytest.mark.parametrize("K", [3, 4, 5, 6])
def test_correctable_flips_return_the_codeword(K, rng):
    radius = ((1 << (K - 1)) - 1) // 2
    length = (1 << K) - 1
    for _ in range(300):
        generator = rng.integers(0, 2, size=K)
        word = SimplexWord.from_generator_bits(generator)
        flips = 1 + rng.choice(length, size=int(rng.integers(0, radius + 1)), replace=False)
        word.bits[flips] ^= 1
        assert simplex_outer_decode(word).tolist() == generator.tolist()


def test_all_single_and_double_flips_at_k4():
    K, length = 4, 15
    generator = [1, 0, 1, 1]
    for count in (1, 2, 3):
        for flips in combinations(range(1, length + 1), count):
            word = SimplexWord.from_generator_bits(generator)
            word.bits[list(flips)] ^= 1
            assert simplex_outer_decode(word).tolist() == generator


@pytest.mark.slow
@pytest.mark.parametrize("K", [5, 6])
def test_sampled_brute_force_equivalence(K, rng):
    for _ in range(100_000 if K == 5 else 20_000):
        bits = rng.integers(0, 2, size=1 << K).astype(np.uint8)
        word = SimplexWord(K, bits)
        assert simplex_outer_decode(word).tolist() == brute_force_nearest_codeword(word).tolist()

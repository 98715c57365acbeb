import numpy as np
import pytest

from symatch.core.gf2 import RowSpace
from symatch.core.lattice import LatticePoly, TorusShape
from symatch.core.registry import CodeRegistry
from symatch.core.symmetry import (
    DependentSet,
    NoPowerOfTwoOrder,
    NotASymmetry,
    TooManySymmetries,
    discover_subsymmetries,
    discover_symmetries_gauss,
    discover_symmetries_kernel,
    enumerate_combinations,
    infinite_symmetry,
    is_subsymmetry,
    is_symmetry,
    power_of_two_order,
    same_span,
    translated_generating_set,
)

REGISTRY = ['TC', 'CC', 'BB144', 'BB288', 'GT98', 'GT240', 'D36', 'D180', 'LC162', 'LC224']


def _gross_polys(code):
    shape = code.shape
    sigma_r = LatticePoly.parse("1 + x^6", shape) * LatticePoly.parse("1 + y^2", shape) * code.B
    sigma_l = LatticePoly.parse("1 + x^6", shape) * LatticePoly.parse("1 + x^2", shape) * code.A
    sigma = LatticePoly.parse("x + y^2 + x^2*y", shape) * sigma_r
    return sigma, sigma_l, sigma_r


def test_gross_has_six_symmetries(gross):
    generators = discover_symmetries_gauss(gross)
    assert len(generators) == 6 == gross.symmetry_count
    assert all(is_symmetry(gross, s.support) for s in generators)
    assert [s.label for s in generators][0] == (1, 0, 0, 0, 0, 0)


def test_gauss_and_kernel_span_agree(gross):
    assert same_span(discover_symmetries_gauss(gross), discover_symmetries_kernel(gross))


def test_gross_closed_form_symmetry(gross):
    sigma, sigma_l, sigma_r = _gross_polys(gross)
    assert len(sigma) == 36
    assert is_symmetry(gross, sigma)
    assert is_subsymmetry(gross, sigma_l, 'L')
    assert is_subsymmetry(gross, sigma_r, 'R')
    span = RowSpace(gross.sites, [s.site_vector for s in discover_symmetries_gauss(gross)])
    assert span.contains(sigma.to_site_vector())


def test_subsymmetries_contain_closed_forms(gross):
    _, sigma_l, sigma_r = _gross_polys(gross)
    left = RowSpace(gross.sites, [s.site_vector for s in discover_subsymmetries(gross, 'L')])
    right = RowSpace(gross.sites, [s.site_vector for s in discover_subsymmetries(gross, 'R')])
    assert left.contains(sigma_l.to_site_vector())
    assert right.contains(sigma_r.to_site_vector())
    with pytest.raises(ValueError):
        discover_subsymmetries(gross, 'Q')


@pytest.mark.parametrize("name", REGISTRY)
def test_every_flip_violates_even_checks_of_each_symmetry(name):
    code = CodeRegistry.create_code(name)
    for symmetry in discover_symmetries_gauss(code):
        restricted = code.hz_dense[symmetry.sites]
        assert not (restricted.sum(axis=0) % 2).any()


def test_infinite_symmetry_on_toric(toric4):
    (symmetry, shifted) = infinite_symmetry(toric4, translations=[(1, 0)])
    assert symmetry.check_count == 16
    assert shifted.check_count == 16


def test_power_of_two_order():
    x4 = LatticePoly.monomial(TorusShape(4, 4), 1, 0)
    assert power_of_two_order(x4, 64) == 4
    x3 = LatticePoly.monomial(TorusShape(3, 3), 1, 0)
    with pytest.raises(NoPowerOfTwoOrder):
        power_of_two_order(x3, 16)


def test_translated_generating_set(toric4):
    everything = discover_symmetries_gauss(toric4)[0]
    (only,) = translated_generating_set(toric4, everything, [(0, 0)])
    assert only.support == everything.support
    with pytest.raises(DependentSet):
        translated_generating_set(toric4, everything, [(0, 0), (1, 0)])
    with pytest.raises(NotASymmetry):
        translated_generating_set(toric4, LatticePoly.one(toric4.shape), [(0, 0)])


def test_enumerate_combinations(gross):
    generators = discover_symmetries_gauss(gross)
    combos = enumerate_combinations(generators)
    assert len(combos) == 63
    selector, combined = combos[2]
    assert selector == 3
    assert combined.support == generators[0].support + generators[1].support
    assert combined.label == (1, 1, 0, 0, 0, 0)
    assert all(is_symmetry(gross, s.support) for _, s in combos)
    with pytest.raises(TooManySymmetries):
        enumerate_combinations(generators, max_generators=5)


def test_symmetry_sum_xors_labels(gross):
    first, second = discover_symmetries_gauss(gross)[:2]
    assert (first + second).label == (1, 1, 0, 0, 0, 0)
    assert np.array_equal((first + first).site_vector, np.zeros(gross.sites, dtype=np.uint8))

import numpy as np
import pytest

from symatch.core.bb_code import CodeError, SyndromeMismatch, brute_force_distance, build_code
from symatch.core.gf2 import BinaryMatrix
from symatch.core.lattice import LatticePoly, TorusShape
from symatch.core.registry import CodeRegistry


def _flip(n, *qubits):
    error = np.zeros(n, dtype=np.uint8)
    error[list(qubits)] = 1
    return error


def test_toric_parameters(toric4):
    assert (toric4.n, toric4.k) == (32, 2)
    assert toric4.hz_dense.shape == (16, 32)
    assert toric4.hx_dense.shape == (16, 32)
    assert toric4.symmetry_count == 1


def test_checks_commute(gross):
    assert not ((gross.hx_dense.astype(int) @ gross.hz_dense.T) & 1).any()
    assert np.all(gross.hz_dense.sum(axis=1) == 6)
    assert np.all(gross.hz_dense.sum(axis=0) == 3)


def test_single_flip_syndrome_on_toric(toric4):
    shape = toric4.shape
    syndrome = toric4.syndrome(_flip(toric4.n, 0))
    # an L flip at the origin violates the checks at 1 and x^-1
    assert sorted(np.flatnonzero(syndrome).tolist()) == sorted([shape.index(0, 0), shape.index(-1, 0)])


def test_initial_correction_reproduces_syndrome(gross, rng):
    for _ in range(10):
        error = (rng.random(gross.n) < 0.05).astype(np.uint8)
        syndrome = gross.syndrome(error)
        correction = gross.initial_correction(syndrome)
        assert np.array_equal(gross.syndrome(correction), syndrome)


def test_logical_basis_is_paired(gross):
    basis = gross.logical_basis()
    assert basis.z.shape == (12, 144) and basis.x.shape == (12, 144)
    assert (basis.x @ basis.z.T) == BinaryMatrix.identity(12)
    assert not ((gross.hx_dense.astype(int) @ basis.z.to_array().T) & 1).any()
    assert not ((gross.hz_dense.astype(int) @ basis.x.to_array().T) & 1).any()


def test_logical_failure_flags(toric4):
    basis = toric4.logical_basis()
    logical = basis.x.row(0)
    verdict = toric4.is_logical_failure(logical, np.zeros(toric4.n, dtype=np.uint8))
    assert verdict.failed
    assert verdict.flags.tolist() == [1, 0]

    error = _flip(toric4.n, 3, 20)
    assert not toric4.is_logical_failure(error, error).failed


def test_logical_failure_rejects_wrong_syndrome(toric4):
    with pytest.raises(SyndromeMismatch):
        toric4.is_logical_failure(_flip(toric4.n, 0), np.zeros(toric4.n, dtype=np.uint8))


def test_stabilizer_is_not_a_failure(toric4):
    stabilizer = toric4.hx_dense[5]
    assert not toric4.is_logical_failure(stabilizer, np.zeros(toric4.n, dtype=np.uint8)).failed


def test_build_code_checks_shape():
    shape = TorusShape(3, 3)
    A = LatticePoly.parse("1 + x", shape)
    B = LatticePoly.parse("1 + y", shape)
    with pytest.raises(CodeError):
        build_code(A, B, TorusShape(4, 4))
    with pytest.raises(CodeError):
        build_code(A, LatticePoly.parse("1 + y", TorusShape(4, 4)))


def test_syndrome_length_is_checked(toric4):
    with pytest.raises(ValueError):
        toric4.syndrome(np.zeros(5))


@pytest.mark.parametrize("name, distance", [("TC4", 4), ("D36", 4)])
def test_brute_force_distance_small(name, distance):
    code = CodeRegistry.create_code(name)
    assert brute_force_distance(code, cap=distance + 1) == distance


def test_brute_force_distance_reports_above_cap(toric4):
    assert brute_force_distance(toric4, cap=3) is None


@pytest.mark.slow
def test_brute_force_distance_lifted_product():
    assert brute_force_distance(CodeRegistry.create_code("LC162"), cap=6, budget=10 ** 7) == 6


@pytest.mark.slow
def test_brute_force_distance_gt98_is_capped():
    # the half-set budget may run out before weight 12
    assert brute_force_distance(CodeRegistry.create_code("GT98"), cap=12) in (12, None)

import numpy as np
import pytest

from symatch.core.belief_propagation import (
    BPConfig,
    BPResult,
    TannerGraph,
    bp_convergence_study,
    bp_decode,
    classical_side_decode,
    posterior_costs,
    side_tanner_graph,
)


def _flip(n, *qubits):
    error = np.zeros(n, dtype=np.uint8)
    error[list(qubits)] = 1
    return error


def test_config_validation():
    with pytest.raises(ValueError):
        BPConfig(method="product-sum")
    with pytest.raises(ValueError):
        BPConfig(max_iters=0)
    with pytest.raises(ValueError):
        BPConfig(ms_scaling_factor=1.5)
    with pytest.raises(ValueError):
        BPConfig(prior=0.0)


def test_config_dict_round_trip():
    config = BPConfig.from_dict({"max-iters": 50, "ms-scaling-factor": 0.625})
    assert config.max_iters == 50 and config.ms_scaling_factor == 0.625
    assert config.to_dict()["bp-method"] == "minsum"
    assert BPConfig.from_dict(config.to_dict()) == config


def test_prior_resolution():
    assert BPConfig().resolve_prior(144) == pytest.approx(3 / 144)
    assert BPConfig().resolve_prior(144, physical=0.02) == 0.02
    assert BPConfig(prior=0.1).resolve_prior(144, physical=0.02) == 0.1


def test_zero_syndrome_converges_immediately(gross):
    result = bp_decode(gross.hz, np.zeros(gross.sites, dtype=np.uint8))
    assert result.converged and result.iterations == 0
    assert not result.hard_decision.any()


def test_single_error_is_decoded(toric4):
    syndrome = toric4.syndrome(_flip(toric4.n, 9))
    result = bp_decode(TannerGraph(toric4.hz_dense), syndrome, prior=0.05)
    assert result.converged
    assert np.array_equal(toric4.syndrome(result.hard_decision), syndrome)
    assert result.posteriors[9] > 0.5


def test_low_weight_gross_errors_converge(gross, rng):
    graph = TannerGraph(gross.hz_dense)
    for _ in range(10):
        error = _flip(gross.n, *rng.choice(gross.n, size=2, replace=False))
        syndrome = gross.syndrome(error)
        result = bp_decode(graph, syndrome, BPConfig(max_iters=200))
        if result.converged:
            assert np.array_equal(gross.syndrome(result.hard_decision), syndrome)


def test_posteriors_are_clipped(toric4):
    result = bp_decode(toric4.hz, np.zeros(toric4.sites, dtype=np.uint8), prior=1e-15)
    assert result.posteriors.min() >= 1e-12


def test_posterior_costs_clamp():
    costs = posterior_costs(np.array([0.5, 1e-15, 0.1]), w_min=1e-3, w_max=20.0)
    assert costs[0] == 1e-3
    assert costs[1] == 20.0
    assert costs[2] == pytest.approx(np.log(9.0))

    result = BPResult(True, 1, np.array([0.25]), np.zeros(1, dtype=np.uint8))
    assert posterior_costs(result)[0] == pytest.approx(np.log(3.0))


def test_side_decode_recovers_one_sided_error(toric4):
    error = _flip(toric4.n, 6)
    correction = classical_side_decode(toric4, 'L', toric4.syndrome(error), prior=0.05)
    assert correction is not None
    assert not correction[toric4.sites:].any()
    assert np.array_equal(toric4.syndrome(correction), toric4.syndrome(error))


def test_side_decode_zero_syndrome(toric4):
    correction = classical_side_decode(toric4, 'R', np.zeros(toric4.sites, dtype=np.uint8))
    assert correction is not None and not correction.any()


def test_side_tanner_graph_rejects_unknown_side(toric4):
    assert side_tanner_graph(toric4, 'L').n == toric4.sites
    with pytest.raises(ValueError):
        side_tanner_graph(toric4, 'X')


def test_convergence_study_counts_per_cap(toric4):
    counts = bp_convergence_study(toric4, 1, [10, 1])
    # min-sum needs two rounds to resolve a lone flip between two violated checks
    assert counts == {1: toric4.n, 10: 0}


def test_convergence_study_with_explicit_errors(toric4):
    counts = bp_convergence_study(toric4, 0, [5], errors=[()])
    assert counts == {5: 0}

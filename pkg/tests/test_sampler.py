from fractions import Fraction

import numpy as np
import pytest

from inducert.errors import PreconditionError, RangeViolation
from inducert.graphs import Graph, parse_graph, parse_graph6
from inducert.sampler import (
    ShiftedKernel,
    adjacency_graph6,
    certificate_crosscheck,
    estimate_induced,
    estimate_t,
    jackknife,
    sample_graph,
)
from inducert.stepkernel import balanced_kernel_B, constant, linear_direction_kernel, StepKernel

K2 = Graph(2, [(0, 1)])


def test_seed_determinism_and_thread_independence():
    W = linear_direction_kernel()
    a = estimate_t(parse_graph("K3"), W, 9000, seed=5)
    b = estimate_t(parse_graph("K3"), W, 9000, seed=5)
    c = estimate_t(parse_graph("K3"), W, 9000, seed=5, threads=3)
    assert a == b == c
    assert estimate_t(parse_graph("K3"), W, 9000, seed=6).estimate != a.estimate
    g1 = sample_graph(constant(Fraction(1, 2)), 30, seed=1)
    assert np.array_equal(g1, sample_graph(constant(Fraction(1, 2)), 30, seed=1))


def test_constant_graphons():
    adj = sample_graph(constant(0), 20, seed=0)
    assert not adj.any()
    adj = sample_graph(constant(1), 20, seed=0)
    assert adj.sum() == 20 * 19
    adj = sample_graph(constant(Fraction(3, 10)), 400, seed=2)
    dens = adj.sum() / (400 * 399)
    assert abs(dens - 0.3) < 0.01
    assert np.array_equal(adj, adj.T) and not adj.diagonal().any()


def test_graph6_of_sample():
    adj = sample_graph(constant(Fraction(1, 2)), 12, seed=3)
    g = parse_graph6(adjacency_graph6(adj))
    assert g.order == 12 and g.num_edges == adj.sum() // 2
    with pytest.raises(PreconditionError):
        adjacency_graph6(np.zeros((63, 63), dtype=bool))


def test_range_violation():
    with pytest.raises(RangeViolation):
        sample_graph(linear_direction_kernel(), 10, seed=0)
    with pytest.raises(RangeViolation):
        estimate_induced(parse_graph("K3"), balanced_kernel_B(), None, 100, seed=0)


def test_targets_within_five_standard_errors():
    r = estimate_t(parse_graph("C4"), balanced_kernel_B(), 20000, seed=0, target=Fraction(1, 16))
    assert r.consistent, r
    r = estimate_t(K2, constant(Fraction(2, 7)), 100, seed=0, target=Fraction(2, 7))
    assert r.stderr < 1e-12 and abs(r.estimate - 2 / 7) < 1e-12
    r = estimate_induced(parse_graph("K3"), constant(Fraction(1, 2)), 9, 8000, seed=1, target=Fraction(1, 8))
    assert r.consistent, r


def test_stderr_scales_with_reps():
    W = linear_direction_kernel()
    a = estimate_t(parse_graph("K3"), W, 20000, seed=11)
    b = estimate_t(parse_graph("K3"), W, 40000, seed=12)
    assert abs(b.stderr / a.stderr - 2**-0.5) < 0.2 * 2**-0.5


def test_jackknife_equals_classical_se_for_the_mean():
    x = np.random.default_rng(0).normal(size=500)
    mean, se = jackknife(x)
    assert abs(mean - x.mean()) < 1e-12
    assert abs(se - x.std(ddof=1) / np.sqrt(len(x))) < 1e-12
    with pytest.raises(PreconditionError):
        jackknife(x[:1])


def test_certificate_crosscheck_flags_tiny_gap():
    from inducert.certifier import certify_full

    cert = certify_full(parse_graph("K3"), Fraction(1, 2), Fraction(1, 4))
    res = certificate_crosscheck(cert, None, 5000, seed=0)
    assert res["edge_density"].consistent
    rho = res["induced_density"]
    assert rho.below_resolution and "resolution" in rho.note
    assert rho.consistent
    assert isinstance(ShiftedKernel(cert.p, cert.kernel()).factors, tuple)

"""Symbolic phase algebra and the compensation map."""

import numpy as np
import pytest

import graphclust as gc
from graphclust import oracle, weyl
from graphclust.errors import IndexMismatch, NotBasic
from graphclust.graphs import WeightedGraph

from support import (
    example_i_graph, measurement_graph_x, random_admissible_graph,
    random_basic_graph, wire_graph,
)


def test_chi_examples():
    assert weyl.chi_exponent([0], [1], 3) == 0
    assert weyl.chi_exponent([1], [1], 2) == 2  # phase -1
    assert weyl.chi_exponent([1], [2], 3) == 4  # phase exp(4*pi*i/3)
    assert weyl.phase_value(2, 2) == pytest.approx(-1)
    with pytest.raises(IndexMismatch):
        weyl.chi_exponent([1], [1, 0], 2)


def test_tau_examples():
    loop = WeightedGraph.from_edges(2, {1: "output"}, [(1, 1, 1)])
    assert weyl.tau_exponent(loop, [0]) == 0
    assert weyl.tau_exponent(loop, [1]) == 1  # phase i
    assert weyl.phase_value(1, 2) == pytest.approx(1j)


def test_tau_edge_product_form():
    # without self-links the quadratic phase is the product over edges
    rng = np.random.default_rng(31)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        adj = rng.integers(0, 2, (n, n))
        adj = np.triu(adj, 1)
        adj = adj + adj.T
        g = WeightedGraph(2, tuple(range(1, n + 1)), tuple(["output"] * n), adj)
        q = rng.integers(0, 2, n)
        expect = 1.0
        for a in range(n):
            for b in range(a + 1, n):
                expect *= (-1.0) ** (int(q[a]) * int(adj[a, b]) * int(q[b]))
        assert weyl.phase_value(weyl.tau_exponent(g, q), 2) == pytest.approx(expect)


def test_tau_zero_extension():
    g = example_i_graph()
    q = np.array([1, 1])
    full = np.zeros(8, dtype=int)
    full[[0, 1]] = 1
    assert weyl.tau_exponent(g, q, support=(1, 2)) == weyl.tau_exponent(g, full)


def test_compose_identity_and_anticommutation():
    ident = gc.WeylLabel.identity(2, (1,))
    w = gc.WeylLabel(2, (1,), [1], [0])
    assert weyl.weyl_compose(ident, w) == w
    zx = weyl.weyl_compose(gc.WeylLabel(2, (1,), [1], [0]), gc.WeylLabel(2, (1,), [0], [1]))
    xz = weyl.weyl_compose(gc.WeylLabel(2, (1,), [0], [1]), gc.WeylLabel(2, (1,), [1], [0]))
    assert zx.p[0] == xz.p[0] and zx.q[0] == xz.q[0]
    assert (xz.phase - zx.phase) % 4 == 2  # anticommute


def test_compose_with_inverse_translation():
    for d in (2, 3):
        w = gc.WeylLabel(d, (1, 2), [1, d - 1], [0, 1])
        back = gc.WeylLabel(d, (1, 2), (-w.p) % d, (-w.q) % d)
        prod = weyl.weyl_compose(w, back)
        assert not prod.p.any() and not prod.q.any()
        # cross character of the pair, checked against the dense product
        lhs = oracle.weyl_matrix(w).matrix @ oracle.weyl_matrix(back).matrix
        assert np.max(np.abs(lhs - oracle.weyl_matrix(prod).matrix)) < 1e-12
        assert prod.phase == weyl.chi_exponent(w.p, w.q, d)


def test_adjoint_inverts():
    rng = np.random.default_rng(32)
    for d in (2, 3, 5):
        for _ in range(10):
            w = gc.WeylLabel(d, (1, 2), rng.integers(0, d, 2), rng.integers(0, d, 2),
                             int(rng.integers(0, 2 * d)))
            prod = weyl.weyl_compose(w, w.adjoint())
            assert prod.is_identity


def test_symplectic_examples():
    assert weyl.symplectic_form([1], [0], [1], [0], 2) == 0
    assert weyl.symplectic_form([1], [0], [0], [1], 2) == 1
    with pytest.raises(IndexMismatch):
        weyl.symplectic_form([1], [0, 1], [0], [1], 2)


def test_stabilizer_labels_isotropic_and_commuting():
    rng = np.random.default_rng(33)
    cases = [measurement_graph_x(d) for d in (2, 3, 5, 7)]
    cases += [random_admissible_graph(rng, d, 4) for d in (2, 3) for _ in range(5)]
    for g in cases:
        labels = oracle.stabilizer_labels(g)
        for a in labels:
            for b in labels:
                assert weyl.symplectic_form(a.p, a.q, b.p, b.q, g.d) == 0
                ab, ba = weyl.weyl_compose(a, b), weyl.weyl_compose(b, a)
                assert ab == ba  # identical label including the phase


def test_power_phases_match_oracle():
    rng = np.random.default_rng(34)
    for d in (2, 3):
        for _ in range(10):
            w = gc.WeylLabel(d, (1, 2), rng.integers(0, d, 2), rng.integers(0, d, 2))
            mat = oracle.weyl_matrix(w).matrix
            acc = gc.WeylLabel.identity(d, (1, 2))
            acc_mat = np.eye(d**2)
            for _n in range(1, 2 * d + 1):
                acc = weyl.weyl_compose(w, acc)
                acc_mat = mat @ acc_mat
                assert np.max(np.abs(oracle.weyl_matrix(acc).matrix - acc_mat)) < 1e-10


def test_compensation_map_wire():
    theta = gc.compensation_map(wire_graph())
    assert theta.outcome_index == (1,) and theta.output_index == (2,)
    assert theta.momentum.tolist() == [[0]]
    # translation is the shift by the outcome itself (sign-free at d = 2)
    assert theta.position.tolist() == [[1]]
    label = gc.byproduct(theta, [1])
    assert label.p.tolist() == [0] and label.q.tolist() == [1] and label.phase == 0


def test_compensation_requires_basic():
    g = WeightedGraph.from_edges(2, {1: "measuring", 2: "output"}, [])
    with pytest.raises(NotBasic):
        gc.compensation_map(g)


def test_compensation_exists_for_example_i():
    theta = gc.compensation_map(example_i_graph())
    assert theta.momentum.shape == (2, 6) and theta.position.shape == (2, 6)


def test_byproduct_identity_and_linearity():
    rng = np.random.default_rng(35)
    for d in (2, 3):
        g = random_basic_graph(rng, d, 5, need_measuring=True)
        theta = gc.compensation_map(g)
        n = len(theta.outcome_index)
        zero = gc.byproduct(theta, np.zeros(n, int))
        assert zero.is_identity
        a = rng.integers(0, d, n)
        b = rng.integers(0, d, n)
        wa, wb, wab = (gc.byproduct(theta, v) for v in (a, b, (a + b) % d))
        assert np.array_equal((wa.p + wb.p) % d, wab.p)
        assert np.array_equal((wa.q + wb.q) % d, wab.q)


def test_compensator_identity_on_oracle():
    # u_[G|0] equals lambda * w(Theta p)^adj u_[G|p] with |lambda| = 1
    rng = np.random.default_rng(36)
    for d in (2, 3):
        for _ in range(6):
            g = random_basic_graph(rng, d, 4, need_measuring=True)
            theta = gc.compensation_map(g)
            u0 = gc.encoding_operator(g)
            for p in gc.field.configurations(d, len(theta.outcome_index))[:9]:
                up = gc.encoding_operator(g, outcome=p)
                corr = oracle.weyl_matrix(gc.byproduct(theta, p).adjoint()) @ up
                kappa = gc.equal_up_to_phase(u0, corr, 1e-10)
                assert kappa is not None and abs(abs(kappa) - 1) < 1e-10

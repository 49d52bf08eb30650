"""Shared fixtures and random-instance generators for the test suite."""

from __future__ import annotations

import numpy as np

import graphclust as gc
from graphclust import graphs
from graphclust.graphs import Role, WeightedGraph


# -- worked examples -----------------------------------------------------------

EXAMPLE_I_ADJACENCY = np.array([
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [1, 0, 0, 1, 1, 0, 0, 0],
    [0, 1, 1, 0, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0],
])

EXAMPLE_I_STEP1 = np.array([  # on vertices (1, 2, 5, 6, 7, 8)
    [0, 1, 0, 1, 0, 0],
    [1, 0, 1, 0, 0, 0],
    [0, 1, 0, 1, 1, 0],
    [1, 0, 1, 0, 0, 1],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
])

EXAMPLE_I_FINAL = np.array([  # on vertices (1, 2, 7, 8)
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 1],
    [0, 1, 1, 0],
])


def example_i_graph() -> WeightedGraph:
    roles = {1: Role.INPUT, 2: Role.INPUT, 3: Role.MEASURING, 4: Role.MEASURING,
             5: Role.MEASURING, 6: Role.MEASURING, 7: Role.OUTPUT, 8: Role.OUTPUT}
    return WeightedGraph(2, tuple(range(1, 9)),
                         tuple(roles[v] for v in range(1, 9)), EXAMPLE_I_ADJACENCY)


def example_ii_graph() -> WeightedGraph:
    """3 x 2 lattice patch: measured column (1, 3, 2), output column (8, 9, 10)."""
    roles = {1: "measuring", 2: "measuring", 3: "measuring",
             8: "output", 9: "output", 10: "output"}
    edges = [(1, 3, 1), (2, 3, 1), (8, 9, 1), (9, 10, 1),
             (1, 8, 1), (3, 9, 1), (2, 10, 1)]
    return WeightedGraph.from_edges(2, roles, edges)


def example_ii_strategy():
    return {1: gc.XBasis(), 2: gc.ZBasis(), 3: gc.YBasis(1)}


# hand-derived elimination of example II (independent of the library code):
# converted graph adds edge (2,4) and a self-link at 3; removing {2,4} leaves
# the lattice minus vertex 2 with the self-link; removing {3} toggles the
# 1-9 edge and the self-links at 1 and 9; removing {1} toggles 8-9 and the
# self-links at 8 and 9 back.
EXAMPLE_II_STEP1 = np.array([  # on vertices (1, 3, 8, 9, 10)
    [0, 1, 1, 0, 0],
    [1, 1, 0, 1, 0],
    [1, 0, 0, 1, 0],
    [0, 1, 1, 0, 1],
    [0, 0, 0, 1, 0],
])

EXAMPLE_II_STEP2 = np.array([  # on vertices (1, 8, 9, 10)
    [1, 1, 1, 0],
    [1, 0, 1, 0],
    [1, 1, 1, 1],
    [0, 0, 1, 0],
])

EXAMPLE_II_FINAL = np.array([  # on vertices (8, 9, 10)
    [1, 0, 0],
    [0, 0, 1],
    [0, 1, 0],
])


def wire_graph(d: int = 2) -> WeightedGraph:
    return WeightedGraph.from_edges(d, {1: "input", 2: "output"}, [(1, 2, 1)])


def k4_graph() -> WeightedGraph:
    roles = {v: "output" for v in (1, 2, 3, 4)}
    edges = [(a, b, 1) for a in (1, 2, 3, 4) for b in (1, 2, 3, 4) if a < b]
    return WeightedGraph.from_edges(2, roles, edges)


def measurement_graph_x(d: int, m: int = 1, l: int = 2) -> WeightedGraph:
    return WeightedGraph.from_edges(d, {m: "output", l: "syndrome"}, [(m, l, 1)])


def measurement_graph_y(d: int, m: int = 1, l: int = 2, weight: int = 1) -> WeightedGraph:
    return WeightedGraph.from_edges(d, {m: "output", l: "syndrome"},
                                    [(m, m, weight), (m, l, 1)])


def measurement_graph_z(d: int, m: int = 1, k: int = 2, l: int = 3) -> WeightedGraph:
    return WeightedGraph.from_edges(
        d, {m: "output", k: "auxiliary", l: "syndrome"}, [(m, k, 1), (k, l, 1)])


def pentagon_code_graph(d: int) -> WeightedGraph:
    """Five-output ring code: one input linked to every ring vertex, one
    syndrome pinned to each of four ring vertices."""
    roles = {1: "input"}
    roles.update({v: "output" for v in (2, 3, 4, 5, 6)})
    roles.update({v: "syndrome" for v in (7, 8, 9, 10)})
    ring = [(2, 3, 1), (3, 4, 1), (4, 5, 1), (5, 6, 1), (2, 6, 1)]
    spokes = [(1, v, 1) for v in (2, 3, 4, 5, 6)]
    pins = [(7, 2, 1), (8, 3, 1), (9, 4, 1), (10, 5, 1)]
    return WeightedGraph.from_edges(d, roles, ring + spokes + pins)


# -- random instances ----------------------------------------------------------


def random_symmetric(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    a = rng.integers(0, d, (n, n))
    a = np.triu(a)
    return (a + np.triu(a, 1).T) % d


def random_graph(rng: np.random.Generator, d: int, n_max: int = 5,
                 roles=("input", "output", "measuring"),
                 require=("output",)) -> WeightedGraph:
    while True:
        n = int(rng.integers(2, n_max + 1))
        assigned = {v: roles[int(rng.integers(0, len(roles)))] for v in range(1, n + 1)}
        if any(r not in assigned.values() for r in require):
            continue
        return WeightedGraph(d, tuple(range(1, n + 1)),
                             tuple(Role(assigned[v]) for v in range(1, n + 1)),
                             random_symmetric(rng, d, n))


def random_basic_graph(rng: np.random.Generator, d: int, n_max: int = 5,
                       need_measuring: bool = False,
                       need_inputs: bool = False) -> WeightedGraph:
    while True:
        g = random_graph(rng, d, n_max)
        if need_measuring and not g.measuring:
            continue
        if need_inputs and not g.inputs:
            continue
        if not (g.inputs or g.measuring):
            continue
        if gc.is_basic(g):
            return g


def random_nonbasic_graph(rng: np.random.Generator, d: int, n_max: int = 5) -> WeightedGraph:
    while True:
        g = random_graph(rng, d, n_max)
        if not (g.inputs or g.measuring):
            continue
        if not gc.is_basic(g):
            return g


def random_admissible_graph(rng: np.random.Generator, d: int, n_max: int = 4,
                            no_inputs: bool = False) -> WeightedGraph:
    """Rejection-sample a graph satisfying the three code conditions."""
    pool = ("output", "auxiliary", "syndrome") if no_inputs else \
           ("input", "output", "auxiliary", "syndrome")
    while True:
        n = int(rng.integers(1, n_max + 1))
        assigned = {v: pool[int(rng.integers(0, len(pool)))] for v in range(1, n + 1)}
        g = WeightedGraph(d, tuple(range(1, n + 1)),
                          tuple(Role(assigned[v]) for v in range(1, n + 1)),
                          random_symmetric(rng, d, n))
        if g.syndrome:
            adj = g.adjacency.copy()
            adj.flags.writeable = True
            idx = [g.index(v) for v in g.syndrome]
            adj[np.ix_(idx, idx)] = 0
            g = WeightedGraph(d, g.vertices, g.roles, adj)
        if graphs.validate_admissible(g).admissible:
            return g


def random_measurement_graph(rng: np.random.Generator, d: int, outputs,
                             aux_count: int, id_start: int) -> WeightedGraph:
    """Admissible graph without inputs whose outputs are exactly `outputs`;
    auxiliaries and syndromes get fresh ids from id_start."""
    outputs = tuple(sorted(outputs))
    aux = tuple(range(id_start, id_start + aux_count))
    syn = tuple(range(id_start + aux_count, id_start + aux_count + len(outputs)))
    verts = tuple(sorted(outputs + aux + syn))
    roles = {}
    for v in outputs:
        roles[v] = Role.OUTPUT
    for v in aux:
        roles[v] = Role.AUXILIARY
    for v in syn:
        roles[v] = Role.SYNDROME
    while True:
        adj = random_symmetric(rng, d, len(verts))
        g = WeightedGraph(d, verts, tuple(roles[v] for v in verts), adj)
        idx = [g.index(v) for v in syn]
        a2 = g.adjacency.copy()
        a2.flags.writeable = True
        a2[np.ix_(idx, idx)] = 0
        g = WeightedGraph(d, verts, g.roles, a2)
        if graphs.validate_admissible(g).admissible:
            return g


def random_state(rng: np.random.Generator, d: int, support) -> gc.StateVector:
    n = len(tuple(support))
    amps = rng.normal(size=d**n) + 1j * rng.normal(size=d**n)
    return gc.StateVector(d, tuple(support), amps).normalized()


def enumerate_admissible_binary(n_max: int = 4):
    """Every admissible graph on at most n_max vertices over F_2.

    Yields WeightedGraph instances; the quick invertibility filter runs on
    plain integer determinants before any graph object is built.
    """
    from itertools import product

    for n in range(1, n_max + 1):
        verts = tuple(range(1, n + 1))
        for roles in product((Role.INPUT, Role.OUTPUT, Role.AUXILIARY, Role.SYNDROME),
                             repeat=n):
            i = [v for v, r in zip(verts, roles) if r is Role.INPUT]
            j = [v for v, r in zip(verts, roles) if r is Role.OUTPUT]
            k = [v for v, r in zip(verts, roles) if r is Role.AUXILIARY]
            l = [v for v, r in zip(verts, roles) if r is Role.SYNDROME]
            if len(i) + len(l) != len(j):
                continue
            lset = set(l)
            free = [(a, b) for a in range(n) for b in range(a, n)
                    if not (verts[a] in lset and verts[b] in lset)]
            rows = [verts.index(v) for v in sorted(j + k)]
            cols = [verts.index(v) for v in sorted(i + k + l)]
            for bits in product((0, 1), repeat=len(free)):
                adj = np.zeros((n, n), dtype=np.int64)
                for (a, b), w in zip(free, bits):
                    adj[a, b] = w
                    adj[b, a] = w
                blk = adj[np.ix_(rows, cols)]
                if blk.size:
                    det = int(round(np.linalg.det(blk)))
                    if det % 2 == 0:
                        continue
                yield WeightedGraph(2, verts, roles, adj)

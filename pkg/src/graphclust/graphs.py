"""Weighted graphs over F_d with vertex roles, and the rewrite calculus.

A graph is a symmetric F_d adjacency matrix over an ordered vertex set,
with each vertex assigned one of five roles.  Vertices are integers and
every matrix or vector over a vertex set is indexed in ascending id order,
so block extraction like ``g.block(rows, cols)`` is unambiguous.

Self-link weights need one extra bit of care: they act on states through
phases exp(i*pi*w*q^2/d), so they matter modulo 2d while the graph itself
is reduced mod d.  Rewrites that have to preserve the induced dynamics
exactly therefore carry a parallel vector of integer "loop weights"
(mod 2d, congruent to the diagonal mod d); see `default_loops` and
`schur_complement_loops`.  For odd d the even representative is the unique
choice closed under the calculus, so the bookkeeping is canonical; for
d = 2 the two lifts of a self-link are genuinely different operators and
the trace keeps track of which one is meant.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from . import field
from .errors import (
    InvalidSubset,
    NotBinary,
    NotInvertible,
    NotInvertibleBlock,
    PreconditionViolated,
    VertexCollision,
)


class Role(str, Enum):
    INPUT = "input"
    OUTPUT = "output"
    MEASURING = "measuring"
    AUXILIARY = "auxiliary"
    SYNDROME = "syndrome"


class Removability(Enum):
    REMOVABLE = "removable"
    PRE_REMOVABLE = "pre-removable"
    NEITHER = "neither"


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Immutable weighted graph over F_d with vertex roles.

    vertices are strictly increasing ints; roles is a tuple aligned with
    them; adjacency is a symmetric int64 matrix with entries in 0..d-1.
    """

    d: int
    vertices: tuple[int, ...]
    roles: tuple[Role, ...]
    adjacency: np.ndarray

    def __post_init__(self):
        field.check_modulus(self.d)
        verts = tuple(int(v) for v in self.vertices)
        if any(b <= a for a, b in zip(verts, verts[1:])):
            raise ValueError("vertices must be strictly increasing")
        roles = tuple(Role(r) for r in self.roles)
        if len(roles) != len(verts):
            raise ValueError("one role per vertex required")
        adj = field.as_field(self.adjacency, self.d)
        if adj.shape != (len(verts), len(verts)):
            raise ValueError("adjacency shape does not match vertex count")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "roles", roles)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, d: int, roles: Mapping[int, Role | str],
                   edges: Iterable[tuple[int, int, int]] = ()) -> "WeightedGraph":
        """Build a graph from a role map and (i, j, weight) edges.

        i == j declares a self-link.  Listing the same unordered pair twice
        is rejected rather than summed.
        """
        verts = tuple(sorted(int(v) for v in roles))
        if len(verts) != len(roles):
            raise ValueError("duplicate vertex ids in role map")
        pos = {v: i for i, v in enumerate(verts)}
        adj = np.zeros((len(verts), len(verts)), dtype=np.int64)
        seen = set()
        for i, j, w in edges:
            if i not in pos or j not in pos:
                raise ValueError(f"edge ({i},{j}) uses unknown vertex")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            adj[pos[i], pos[j]] = w % d
            adj[pos[j], pos[i]] = w % d
        return cls(d, verts, tuple(Role(roles[v]) for v in verts), adj)

    # -- indexing -----------------------------------------------------------

    def index(self, v: int) -> int:
        try:
            return self.vertices.index(v)
        except ValueError:
            raise KeyError(f"vertex {v} not in graph") from None

    def role(self, v: int) -> Role:
        return self.roles[self.index(v)]

    def by_role(self, role: Role) -> tuple[int, ...]:
        return tuple(v for v, r in zip(self.vertices, self.roles) if r is role)

    @property
    def inputs(self) -> tuple[int, ...]:
        return self.by_role(Role.INPUT)

    @property
    def outputs(self) -> tuple[int, ...]:
        return self.by_role(Role.OUTPUT)

    @property
    def measuring(self) -> tuple[int, ...]:
        return self.by_role(Role.MEASURING)

    @property
    def auxiliary(self) -> tuple[int, ...]:
        return self.by_role(Role.AUXILIARY)

    @property
    def syndrome(self) -> tuple[int, ...]:
        return self.by_role(Role.SYNDROME)

    def block(self, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
        """Sub-block with rows/cols taken in ascending vertex order."""
        ri = [self.index(v) for v in sorted(rows)]
        ci = [self.index(v) for v in sorted(cols)]
        return self.adjacency[np.ix_(ri, ci)].copy()

    def weight(self, i: int, j: int) -> int:
        return int(self.adjacency[self.index(i), self.index(j)])

    def neighbors(self, v: int) -> tuple[int, ...]:
        i = self.index(v)
        return tuple(w for j, w in enumerate(self.vertices)
                     if j != i and self.adjacency[i, j])

    def has_self_link(self, v: int) -> bool:
        i = self.index(v)
        return bool(self.adjacency[i, i])

    # -- derived graphs ------------------------------------------------------

    def with_roles(self, updates: Mapping[int, Role | str]) -> "WeightedGraph":
        roles = {v: r for v, r in zip(self.vertices, self.roles)}
        for v, r in updates.items():
            if v not in roles:
                raise KeyError(f"vertex {v} not in graph")
            roles[v] = Role(r)
        return WeightedGraph(self.d, self.vertices,
                             tuple(roles[v] for v in self.vertices), self.adjacency)

    def induced(self, keep: Iterable[int]) -> "WeightedGraph":
        keep = tuple(sorted(keep))
        idx = [self.index(v) for v in keep]
        return WeightedGraph(self.d, keep,
                             tuple(self.roles[i] for i in idx),
                             self.adjacency[np.ix_(idx, idx)])

    def key(self) -> tuple:
        """Hashable identity (exact matrix equality, no isomorphism search)."""
        return (self.d, self.vertices, self.roles, self.adjacency.tobytes())

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.key() == other.key()

    def __repr__(self) -> str:
        parts = ", ".join(f"{v}:{r.value[0]}" for v, r in zip(self.vertices, self.roles))
        return f"WeightedGraph(d={self.d}, [{parts}])"


def zero_extended(g: WeightedGraph, support: Iterable[int]) -> np.ndarray:
    """Adjacency of g placed inside the larger vertex set `support`."""
    support = tuple(sorted(support))
    missing = set(g.vertices) - set(support)
    if missing:
        raise ValueError(f"support does not cover vertices {sorted(missing)}")
    out = np.zeros((len(support), len(support)), dtype=np.int64)
    idx = [support.index(v) for v in g.vertices]
    out[np.ix_(idx, idx)] = g.adjacency
    return out


def default_loops(g: WeightedGraph) -> np.ndarray:
    """Loop weights (mod 2d) implied by the bare F_d graph.

    d = 2: the diagonal as written.  Odd d: the even representative, which
    is the unique one that makes the induced diagonal dynamics a d-th root
    of unity and is preserved by the rewrite rules.
    """
    diag = np.diag(g.adjacency).astype(np.int64)
    if g.d % 2:
        return np.where(diag % 2, diag + g.d, diag) % (2 * g.d)
    return diag % (2 * g.d)


def loops_after_difference(minuend: np.ndarray, subtrahend: np.ndarray, d: int) -> np.ndarray:
    """Loop weights of a graph difference, from the operands' loop weights."""
    return (np.asarray(minuend, np.int64) - np.asarray(subtrahend, np.int64)) % (2 * d)


# -- predicates ---------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    g1: bool
    g2: bool
    g3: bool

    @property
    def admissible(self) -> bool:
        return self.g1 and self.g2 and self.g3


def validate_admissible(g: WeightedGraph) -> AdmissibilityReport:
    """Check the three conditions a code graph has to satisfy.

    g1: #inputs + #syndromes == #outputs.
    g2: the block with rows outputs+auxiliary and columns
        inputs+auxiliary+syndromes is invertible.
    g3: no edges (including self-links) among syndrome vertices.

    Measuring vertices have no place in this classification.
    """
    if g.measuring:
        raise ValueError("admissibility applies to graphs without measuring vertices")
    i, j, k, l = g.inputs, g.outputs, g.auxiliary, g.syndrome
    g1 = len(i) + len(l) == len(j)
    blk = g.block(j + k, i + k + l)
    g2 = blk.shape[0] == blk.shape[1] and field.rank(blk, g.d) == blk.shape[0]
    g3 = not np.any(g.block(l, l))
    return AdmissibilityReport(g1, g2, g3)


def is_basic(g: WeightedGraph) -> bool:
    """True iff the block with rows outputs+measuring and columns
    inputs+measuring is injective over F_d."""
    if g.auxiliary or g.syndrome:
        raise ValueError("basic-graph test applies to input/output/measuring graphs")
    cols = g.inputs + g.measuring
    blk = g.block(g.outputs + g.measuring, cols)
    return field.rank(blk, g.d) == len(cols)


def removability_class(g: WeightedGraph, subset: Iterable[int]) -> Removability:
    """Classify a set of measuring/output vertices for elimination.

    Pre-removable: the diagonal block over the subset is invertible.
    Removable: pre-removable and free of output vertices.
    """
    subset = tuple(sorted(subset))
    for v in subset:
        if g.role(v) not in (Role.MEASURING, Role.OUTPUT):
            raise InvalidSubset(f"vertex {v} has role {g.role(v).value}")
    if not field.is_invertible(g.block(subset, subset), g.d):
        return Removability.NEITHER
    if any(g.role(v) is Role.OUTPUT for v in subset):
        return Removability.PRE_REMOVABLE
    return Removability.REMOVABLE


# -- rewrites -----------------------------------------------------------------


def schur_complement(g: WeightedGraph, removed: Iterable[int]) -> WeightedGraph:
    """Eliminate `removed` by the Schur complement of its diagonal block.

    The result lives on the surviving vertices with roles unchanged and is
    again symmetric.  Raises NotInvertibleBlock when the block over
    `removed` is singular, InvalidSubset when it touches input vertices.
    """
    removed = tuple(sorted(removed))
    for v in removed:
        if g.role(v) is Role.INPUT:
            raise InvalidSubset(f"cannot eliminate input vertex {v}")
        g.index(v)
    keep = tuple(v for v in g.vertices if v not in removed)
    try:
        inv = field.inverse(g.block(removed, removed), g.d)
    except NotInvertible as exc:
        raise NotInvertibleBlock(f"block over {removed} is singular") from exc
    a = g.block(keep, keep)
    b = g.block(keep, removed)
    adj = (a - b @ inv @ b.T) % g.d
    idx = [g.index(v) for v in keep]
    return WeightedGraph(g.d, keep, tuple(g.roles[i] for i in idx), adj)


def schur_complement_loops(g: WeightedGraph, removed: Iterable[int],
                           loops: np.ndarray | None = None) -> tuple[WeightedGraph, np.ndarray]:
    """Schur complement together with the loop-weight update.

    For odd d the new loop weights are just the even representatives of the
    new diagonal.  For d = 2 the eliminated block is inverted mod 2d and the
    correction is taken over the integers, so the surviving diagonal keeps
    its mod-4 meaning.
    """
    removed = tuple(sorted(removed))
    loops = default_loops(g) if loops is None else np.asarray(loops, np.int64)
    new_graph = schur_complement(g, removed)
    keep = new_graph.vertices
    if g.d % 2:
        return new_graph, default_loops(new_graph)
    full = g.adjacency.astype(np.int64).copy()
    np.fill_diagonal(full, loops)
    ki = [g.index(v) for v in keep]
    ri = [g.index(v) for v in removed]
    a = full[np.ix_(ki, ki)]
    b = full[np.ix_(ki, ri)]
    c = full[np.ix_(ri, ri)]
    try:
        cbar = field.inverse_mod(c, 2 * g.d)
    except NotInvertible as exc:  # cannot happen for d=2 when the mod-d block is invertible
        raise NotInvertibleBlock(f"block over {removed} not invertible mod {2*g.d}") from exc
    new_loops = np.diag(a - b @ cbar @ b.T) % (2 * g.d)
    return new_graph, new_loops


def delete_vertices(g: WeightedGraph, dead: Iterable[int]) -> WeightedGraph:
    """Plain vertex removal: restrict the adjacency to the complement."""
    dead = set(dead)
    for v in dead:
        g.index(v)
    return g.induced(v for v in g.vertices if v not in dead)


def join_connecting(g: WeightedGraph, pairing: Mapping[int, int],
                    weights: Mapping[int, int] | None = None) -> WeightedGraph:
    """Attach one fresh partner vertex to each of some output vertices.

    pairing maps output vertices to fresh ids.  Each pair is joined by a
    single edge (weight 1 unless given).  The partners become outputs and
    the paired outputs become measuring, which is the bookkeeping used when
    an output has to be eliminated.
    """
    new = list(pairing.values())
    if len(set(new)) != len(new) or set(new) & set(g.vertices):
        raise VertexCollision(f"partner ids {sorted(new)} collide")
    for v in pairing:
        if g.role(v) is not Role.OUTPUT:
            raise InvalidSubset(f"vertex {v} is not an output vertex")
    verts = tuple(sorted(g.vertices + tuple(new)))
    roles = {v: r for v, r in zip(g.vertices, g.roles)}
    adj = np.zeros((len(verts), len(verts)), dtype=np.int64)
    old_idx = [verts.index(v) for v in g.vertices]
    adj[np.ix_(old_idx, old_idx)] = g.adjacency
    for n, m in pairing.items():
        w = 1 if weights is None else int(weights.get(n, 1)) % g.d
        if w == 0:
            raise ValueError("connecting edge weight must be nonzero")
        adj[verts.index(n), verts.index(m)] = w
        adj[verts.index(m), verts.index(n)] = w
        roles[n] = Role.MEASURING
        roles[m] = Role.OUTPUT
    return WeightedGraph(g.d, verts, tuple(roles[v] for v in verts), adj)


def binary_rule(g: WeightedGraph, n: int, k: int | None = None) -> WeightedGraph:
    """Qubit-only graphical elimination by neighborhood toggling.

    k is None: remove the self-linked vertex n; all pairs of its neighbors
    get their edge toggled and each neighbor gets its self-link toggled.

    k given: remove the connected, self-link-free pair (n, k); every vertex
    linked to n gets its edge to every vertex linked to k toggled (counted
    once per ordered incidence, so a doubly-linked pair cancels out).

    Produces the same graph as `schur_complement` on {n} or {n, k}; the two
    routes are kept independent so they can check each other.
    """
    if g.d != 2:
        raise NotBinary("graphical rules are stated for modulus 2")
    if g.role(n) is Role.INPUT or (k is not None and g.role(k) is Role.INPUT):
        raise InvalidSubset("cannot eliminate input vertices")
    adj = g.adjacency.copy()
    adj.flags.writeable = True
    pos = {v: i for i, v in enumerate(g.vertices)}
    if k is None:
        if not g.has_self_link(n):
            raise PreconditionViolated(f"vertex {n} has no self-link")
        nbrs = [v for v in g.neighbors(n)]
        for a in range(len(nbrs)):
            ia = pos[nbrs[a]]
            adj[ia, ia] ^= 1
            for b in range(a + 1, len(nbrs)):
                ib = pos[nbrs[b]]
                adj[ia, ib] ^= 1
                adj[ib, ia] ^= 1
        removed = (n,)
    else:
        if g.has_self_link(n) or g.has_self_link(k):
            raise PreconditionViolated("pair rule needs both vertices self-link free")
        if not g.weight(n, k):
            raise PreconditionViolated(f"vertices {n} and {k} are not connected")
        side_n = [v for v in g.neighbors(n) if v not in (n, k)]
        side_k = [v for v in g.neighbors(k) if v not in (n, k)]
        for a in side_n:
            for b in side_k:
                if a == b:
                    continue
                adj[pos[a], pos[b]] ^= 1
                adj[pos[b], pos[a]] ^= 1
        removed = (n, k)
    keep = [v for v in g.vertices if v not in removed]
    idx = [pos[v] for v in keep]
    return WeightedGraph(g.d, tuple(keep),
                         tuple(g.roles[i] for i in idx), adj[np.ix_(idx, idx)])

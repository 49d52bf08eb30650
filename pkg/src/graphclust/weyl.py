"""Symbolic phase-space translations with exact 2d-th-root-of-unity phases.

A label carries a momentum vector p, a position vector q (both over F_d on
a fixed vertex support) and a phase exponent e meaning exp(i*pi*e/d).
With the shift (x(q)psi)(t) = psi(t - q), the multiplier
(z(p)psi)(t) = chi(p|t) psi(t) and w(p|q) = z(p) x(q), composition obeys

    w(p1|q1) w(p2|q2) = chi(-p2|q1) w(p1+p2|q1+q2),

where chi(p|q) = exp(2*pi*i/d * <p,q>).  (For d = 2 the sign in the cross
character is invisible; for odd d it is forced by the definitions above.)
Quadratic phases tau come from the graph dynamics and are evaluated on
integer loop-aware matrices, so they are well defined mod 2d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import field, graphs
from .errors import IndexMismatch, NotBasic


def phase_value(exponent: int, d: int) -> complex:
    """Complex value exp(i*pi*exponent/d)."""
    return complex(np.exp(1j * np.pi * (exponent % (2 * d)) / d))


def chi_exponent(p, q, d: int) -> int:
    """Exponent (mod 2d) of the pairing character chi(p|q)."""
    p = field.as_field(p, d)
    q = field.as_field(q, d)
    if p.shape != q.shape:
        raise IndexMismatch(f"vector lengths differ: {p.shape} vs {q.shape}")
    return int(2 * (p @ q)) % (2 * d)


def symplectic_form(p1, q1, p2, q2, d: int) -> int:
    """Antisymmetric pairing <p1,q2> - <p2,q1> in F_d."""
    p1, q1 = field.as_field(p1, d), field.as_field(q1, d)
    p2, q2 = field.as_field(p2, d), field.as_field(q2, d)
    if not (p1.shape == q1.shape == p2.shape == q2.shape):
        raise IndexMismatch("phase-space vectors must share one index set")
    return int(p1 @ q2 - p2 @ q1) % d


def loop_matrix(g: graphs.WeightedGraph, loops: np.ndarray | None = None) -> np.ndarray:
    """Integer adjacency with the diagonal replaced by loop weights."""
    loops = graphs.default_loops(g) if loops is None else np.asarray(loops, np.int64)
    if loops.shape != (len(g.vertices),):
        raise IndexMismatch("loop vector length does not match vertex count")
    if np.any((loops - np.diag(g.adjacency)) % g.d):
        raise ValueError("loop weights must reduce to the adjacency diagonal mod d")
    m = g.adjacency.astype(np.int64).copy()
    np.fill_diagonal(m, loops % (2 * g.d))
    return m


def tau_exponent(g: graphs.WeightedGraph, q, support=None,
                 loops: np.ndarray | None = None) -> int:
    """Exponent (mod 2d) of the quadratic phase <q, G q> of the dynamics.

    q is indexed by `support` (default: all vertices) and zero-extended.
    Entries of q and of the loop-aware adjacency are integer representatives,
    q canonical in 0..d-1.
    """
    m = loop_matrix(g, loops)
    if support is None:
        support = g.vertices
    support = tuple(sorted(support))
    q = field.as_field(q, g.d)
    if q.shape != (len(support),):
        raise IndexMismatch("configuration length does not match support")
    full = np.zeros(len(g.vertices), dtype=np.int64)
    for v, val in zip(support, q):
        full[g.index(v)] = val
    return int(full @ m @ full) % (2 * g.d)


@dataclass(frozen=True, eq=False)
class WeylLabel:
    """phase * z(p) x(q) on a fixed vertex support."""

    d: int
    support: tuple[int, ...]
    p: np.ndarray
    q: np.ndarray
    phase: int = 0

    def __post_init__(self):
        field.check_modulus(self.d)
        support = tuple(int(v) for v in self.support)
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ValueError("support must be strictly increasing")
        p = field.as_field(self.p, self.d)
        q = field.as_field(self.q, self.d)
        if p.shape != (len(support),) or q.shape != (len(support),):
            raise IndexMismatch("p and q must have one entry per support vertex")
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "phase", int(self.phase) % (2 * self.d))

    @classmethod
    def identity(cls, d: int, support) -> "WeylLabel":
        n = len(tuple(support))
        return cls(d, tuple(support), np.zeros(n, np.int64), np.zeros(n, np.int64))

    @property
    def is_identity(self) -> bool:
        return self.phase == 0 and not self.p.any() and not self.q.any()

    def phase_factor(self) -> complex:
        return phase_value(self.phase, self.d)

    def adjoint(self) -> "WeylLabel":
        # (z(p)x(q))^* = x(-q) z(-p) = chi(p|q)^(-1) z(-p) x(-q)
        e = (-self.phase - chi_exponent(self.p, self.q, self.d)) % (2 * self.d)
        return WeylLabel(self.d, self.support, (-self.p) % self.d, (-self.q) % self.d, e)

    def __matmul__(self, other: "WeylLabel") -> "WeylLabel":
        return weyl_compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeylLabel):
            return NotImplemented
        return (self.d == other.d and self.support == other.support
                and np.array_equal(self.p, other.p)
                and np.array_equal(self.q, other.q)
                and self.phase == other.phase)

    def __repr__(self) -> str:
        return (f"WeylLabel(d={self.d}, p={self.p.tolist()}, q={self.q.tolist()}, "
                f"phase={self.phase}/{2*self.d})")


def weyl_compose(w1: WeylLabel, w2: WeylLabel) -> WeylLabel:
    """Product label: phases add, plus the cross character chi(-p2|q1).

    The cross sign comes from moving x(q1) past z(p2) with the shift and
    multiplier conventions above; the resulting label agrees entry for
    entry with the dense matrix product.
    """
    if w1.d != w2.d or w1.support != w2.support:
        raise IndexMismatch("labels live on different registers")
    e = (w1.phase + w2.phase - chi_exponent(w2.p, w1.q, w1.d)) % (2 * w1.d)
    return WeylLabel(w1.d, w1.support, (w1.p + w2.p) % w1.d, (w1.q + w2.q) % w1.d, e)


@dataclass(frozen=True)
class CompensationMap:
    """Linear map from x-measurement outcomes to output translations.

    An outcome vector p over `outcome_index` is sent to the translation
    (momentum @ p | position @ p) on `output_index`; applying the matching
    Weyl operator after the measurement restores the standard-outcome
    branch up to a phase.
    """

    d: int
    outcome_index: tuple[int, ...]
    output_index: tuple[int, ...]
    momentum: np.ndarray
    position: np.ndarray


def compensation_map(g: graphs.WeightedGraph) -> CompensationMap:
    """Byproduct map for x measurements at the inputs and measuring vertices.

    Exists exactly when the graph is basic.  Built from the canonical right
    inverse R of the block with rows inputs+measuring and columns
    measuring+outputs:

        momentum = G[outputs, measuring+outputs] @ R,   position = R[outputs].

    Raises NotBasic otherwise.
    """
    if not graphs.is_basic(g):
        raise NotBasic("no compensating map: graph is not basic")
    ik = tuple(sorted(g.inputs + g.measuring))
    kj = tuple(sorted(g.measuring + g.outputs))
    j = g.outputs
    r = field.right_inverse(g.block(ik, kj), g.d)
    momentum = (g.block(j, kj) @ r) % g.d
    rows_j = [kj.index(v) for v in j]
    position = r[rows_j] % g.d
    return CompensationMap(g.d, ik, j, momentum, position)


def byproduct(theta: CompensationMap, outcome) -> WeylLabel:
    """Weyl label compensating one measurement outcome (phase left at 0)."""
    out = field.as_field(outcome, theta.d)
    if out.shape != (len(theta.outcome_index),):
        raise IndexMismatch("outcome length does not match the outcome index")
    return WeylLabel(theta.d, theta.output_index,
                     (theta.momentum @ out) % theta.d,
                     (theta.position @ out) % theta.d)

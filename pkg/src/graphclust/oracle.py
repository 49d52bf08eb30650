"""Dense brute-force simulator on C^(d^n).

Ground truth for every symbolic identity in the package: states, Weyl and
graph-dynamics actions, Fourier transforms, encoding operators, code
isometries, cluster states and projective measurements, all as explicit
complex vectors and matrices.

Conventions, fixed once and used everywhere:

* A register is an ascending tuple of integer vertex ids.  A configuration
  q over a register is flattened little-endian: index = sum_i q(v_i) d**i
  (see `field.configurations`), so every vector and matrix is bit-exact
  reproducible.
* Inner products use the normalized counting (Haar) measure,
  <phi, psi> = d^-n sum conj(phi) psi.  Adjoints of maps between registers
  of different size pick up the matching power of d, so isometries satisfy
  A.adjoint() @ A == identity exactly.
* Graph dynamics is the diagonal exp(i*pi/d * <q, G q>) evaluated on the
  loop-aware integer adjacency (see `graphs.default_loops`): self-link
  weights act mod 2d, the rest mod d.
* Supports larger than the amplitude cap (default 2**20, override with the
  GRAPHCLUST_MAX_AMPLITUDES environment variable or the `cap` argument)
  are refused.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import field, graphs, weyl
from .errors import (
    IndexMismatch,
    NotAdmissible,
    NotInvertible,
    SizeCapExceeded,
    ZeroProbability,
)

DEFAULT_MAX_AMPLITUDES = 2**20


def max_amplitudes(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    env = os.environ.get("GRAPHCLUST_MAX_AMPLITUDES")
    return int(env) if env else DEFAULT_MAX_AMPLITUDES


def _sorted_support(support) -> tuple[int, ...]:
    support = tuple(int(v) for v in support)
    if any(b <= a for a, b in zip(support, support[1:])):
        raise ValueError("support must be strictly increasing")
    return support


def _check_support(d: int, support, cap: int | None = None) -> tuple[int, ...]:
    support = _sorted_support(support)
    if d ** len(support) > max_amplitudes(cap):
        raise SizeCapExceeded(
            f"{d}**{len(support)} amplitudes exceed the cap {max_amplitudes(cap)}")
    return support


@lru_cache(maxsize=256)
def _configs(d: int, n: int) -> np.ndarray:
    out = field.configurations(d, n)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=1024)
def _subindex(d: int, support: tuple[int, ...], subset: tuple[int, ...]) -> np.ndarray:
    """Flat index of the restriction to `subset` for each config over `support`."""
    pos = [support.index(v) for v in subset]
    out = _configs(d, len(support))[:, pos] @ (d ** np.arange(len(subset)))
    out.flags.writeable = False
    return out


# -- states -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over the configurations of a register."""

    d: int
    support: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        field.check_modulus(self.d)
        support = _sorted_support(self.support)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.d ** len(support),):
            raise ValueError("amplitude count must be d**|support|")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        n = len(self.support)
        return float(np.sqrt(self.d ** (-n) * np.sum(np.abs(self.amplitudes) ** 2)))

    def inner(self, other: "StateVector") -> complex:
        if self.d != other.d or self.support != other.support:
            raise IndexMismatch("states live on different registers")
        n = len(self.support)
        return complex(self.d ** (-n) * np.vdot(self.amplitudes, other.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.d, self.support, self.amplitudes / self.norm())

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) / (self.norm() * other.norm())

    def counting_amplitudes(self) -> np.ndarray:
        """Amplitudes in the unit-sum-of-squares convention, for display."""
        return self.amplitudes * self.d ** (-len(self.support) / 2)

    @classmethod
    def from_counting(cls, d: int, support, amps) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        return cls(d, tuple(support), amps * d ** (len(tuple(support)) / 2))


def x_basis_vector(d: int, support, p=None, cap: int | None = None) -> StateVector:
    """Momentum eigenvector: amplitudes chi(p|q), the constant 1 at p = 0."""
    support = _check_support(d, tuple(support), cap)
    n = len(support)
    p = np.zeros(n, np.int64) if p is None else field.as_field(p, d)
    amps = np.exp(2j * np.pi / d * (_configs(d, n) @ p))
    return StateVector(d, support, amps)


def z_basis_vector(d: int, support, q=None, cap: int | None = None) -> StateVector:
    """Position eigenvector: sqrt(d)^n at configuration q, zero elsewhere."""
    support = _check_support(d, tuple(support), cap)
    n = len(support)
    q = np.zeros(n, np.int64) if q is None else field.as_field(q, d)
    amps = np.zeros(d**n, dtype=complex)
    amps[int(q @ d ** np.arange(n))] = d ** (n / 2)
    return StateVector(d, support, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Product state on the merged (disjoint) registers."""
    if a.d != b.d:
        raise IndexMismatch("different moduli")
    if set(a.support) & set(b.support):
        raise IndexMismatch("registers overlap")
    support = tuple(sorted(a.support + b.support))
    ia = _subindex(a.d, support, a.support)
    ib = _subindex(a.d, support, b.support)
    return StateVector(a.d, support, a.amplitudes[ia] * b.amplitudes[ib])


# -- linear maps --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Dense map H_domain -> H_codomain as a raw amplitude matrix."""

    d: int
    domain: tuple[int, ...]
    codomain: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        field.check_modulus(self.d)
        dom = _sorted_support(self.domain)
        cod = _sorted_support(self.codomain)
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.d ** len(cod), self.d ** len(dom)):
            raise ValueError("matrix shape does not match the registers")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "codomain", cod)
        object.__setattr__(self, "matrix", mat)

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            if other.d != self.d or other.support != self.domain:
                raise IndexMismatch("state register does not match the domain")
            return StateVector(self.d, self.codomain, self.matrix @ other.amplitudes)
        if isinstance(other, LinearMap):
            if other.d != self.d or other.codomain != self.domain:
                raise IndexMismatch("maps do not compose")
            return LinearMap(self.d, other.domain, self.codomain,
                             self.matrix @ other.matrix)
        return NotImplemented

    def adjoint(self) -> "LinearMap":
        scale = self.d ** (len(self.domain) - len(self.codomain))
        return LinearMap(self.d, self.codomain, self.domain,
                         scale * self.matrix.conj().T)

    def is_isometry(self, tol: float = 1e-10) -> bool:
        gram = (self.adjoint() @ self).matrix
        return bool(np.max(np.abs(gram - np.eye(gram.shape[0]))) <= tol)

    def promote(self, support) -> "LinearMap":
        """Tensor with the identity on extra vertices taken from `support`."""
        extra = tuple(v for v in support if v not in self.domain)
        if set(extra) & set(self.codomain):
            raise IndexMismatch("extra vertices collide with the codomain")
        if not extra:
            return self
        dom = tuple(sorted(self.domain + extra))
        cod = tuple(sorted(self.codomain + extra))
        _check_support(self.d, dom)
        _check_support(self.d, cod)
        sub_d = _subindex(self.d, dom, self.domain)
        ext_d = _subindex(self.d, dom, extra)
        sub_c = _subindex(self.d, cod, self.codomain)
        ext_c = _subindex(self.d, cod, extra)
        mat = self.matrix[np.ix_(sub_c, sub_d)] * (ext_c[:, None] == ext_d[None, :])
        return LinearMap(self.d, dom, cod, mat)


def identity_map(d: int, support, cap: int | None = None) -> LinearMap:
    support = _check_support(d, tuple(support), cap)
    return LinearMap(d, support, support, np.eye(d ** len(support)))


def embed_map(vec: StateVector, support, cap: int | None = None) -> LinearMap:
    """psi -> vec tensor psi, from H_{support minus vec.support} into H_support."""
    support = _check_support(vec.d, tuple(sorted(support)), cap)
    if not set(vec.support) <= set(support):
        raise IndexMismatch("vector register must lie inside the target register")
    rest = tuple(v for v in support if v not in vec.support)
    d = vec.d
    rows = d ** len(support)
    mat = np.zeros((rows, d ** len(rest)), dtype=complex)
    mat[np.arange(rows), _subindex(d, support, rest)] = \
        vec.amplitudes[_subindex(d, support, vec.support)]
    return LinearMap(d, rest, support, mat)


def extract_map(vec: StateVector, support, cap: int | None = None) -> LinearMap:
    """Partial Haar inner product with vec: the adjoint of `embed_map`."""
    return embed_map(vec, support, cap).adjoint()


def weyl_matrix(w: weyl.WeylLabel, support=None, cap: int | None = None) -> LinearMap:
    """Dense matrix of a Weyl label, promoted to `support` if given."""
    d = w.d
    n = len(w.support)
    _check_support(d, w.support, cap)
    dim = d**n
    cfg = _configs(d, n)
    shifted = ((cfg - w.q) % d) @ (d ** np.arange(n))
    mat = np.zeros((dim, dim), dtype=complex)
    mat[np.arange(dim), shifted] = np.exp(2j * np.pi / d * (cfg @ w.p))
    out = LinearMap(d, w.support, w.support, w.phase_factor() * mat)
    if support is not None and tuple(sorted(support)) != w.support:
        out = out.promote(tuple(sorted(support)))
    return out


def apply_weyl(w: weyl.WeylLabel, psi: StateVector) -> StateVector:
    """Act with phase * z(p) x(q): (w psi)(q1) = phase chi(p|q1) psi(q1 - q)."""
    if w.d != psi.d or w.support != psi.support:
        raise IndexMismatch("label and state live on different registers")
    d, n = w.d, len(w.support)
    cfg = _configs(d, n)
    shifted = ((cfg - w.q) % d) @ (d ** np.arange(n))
    amps = w.phase_factor() * np.exp(2j * np.pi / d * (cfg @ w.p)) * psi.amplitudes[shifted]
    return StateVector(d, psi.support, amps)


def dynamics_map(g: graphs.WeightedGraph, loops=None, cap: int | None = None) -> LinearMap:
    """Diagonal unitary exp(i*pi/d <q, G q>) on the graph's register."""
    support = _check_support(g.d, g.vertices, cap)
    m = weyl.loop_matrix(g, loops)
    cfg = _configs(g.d, len(support))
    quad = np.einsum("ki,ij,kj->k", cfg, m, cfg) % (2 * g.d)
    diag = np.exp(1j * np.pi / g.d * quad)
    return LinearMap(g.d, support, support, np.diag(diag))


def apply_dynamics(g: graphs.WeightedGraph, psi: StateVector, loops=None) -> StateVector:
    if g.vertices != psi.support:
        raise IndexMismatch("graph and state live on different registers")
    m = weyl.loop_matrix(g, loops)
    cfg = _configs(g.d, len(psi.support))
    quad = np.einsum("ki,ij,kj->k", cfg, m, cfg) % (2 * g.d)
    return StateVector(g.d, psi.support, np.exp(1j * np.pi / g.d * quad) * psi.amplitudes)


def fourier_map(c, rows, cols, d: int, cap: int | None = None) -> LinearMap:
    """Fourier transform attached to an invertible matrix c: H_cols -> H_rows.

    (F psi)(q_rows) = sqrt(d)^|cols| Int dq chi(c q | q_rows) psi(q); for a
    connecting graph (one edge per column vertex) it factorizes into
    single-vertex transforms.
    """
    rows = _check_support(d, tuple(sorted(rows)), cap)
    cols = _check_support(d, tuple(sorted(cols)), cap)
    c = field.as_field(c, d)
    if c.shape != (len(rows), len(cols)):
        raise ValueError("matrix shape must be |rows| x |cols|")
    if len(rows) != len(cols) or not field.is_invertible(c, d):
        raise NotInvertible("Fourier transforms need an invertible matrix")
    cr = _configs(d, len(rows))
    cc = _configs(d, len(cols))
    mat = d ** (-len(cols) / 2) * np.exp(
        2j * np.pi / d * ((cc @ c.T)[None, :, :] * cr[:, None, :]).sum(axis=2))
    return LinearMap(d, cols, rows, mat)


# -- graph operators ----------------------------------------------------------


def _role_registers(g: graphs.WeightedGraph):
    if g.auxiliary or g.syndrome:
        raise ValueError("encoding operators live on input/output/measuring graphs")
    return g.inputs, g.outputs, g.measuring


def encoding_operator(g: graphs.WeightedGraph, outcome=None, measured=None,
                      loops=None, cap: int | None = None) -> LinearMap:
    """Operator of one preparation + dynamics + x-measurement round.

    Non-input vertices are prepared in the standard state, the graph
    dynamics acts once, and the `measured` vertices (default: inputs plus
    measuring vertices) are projected onto the x-basis vector labelled by
    `outcome` (default zero), with the sqrt(d)^|measured| normalization
    that makes the standard-outcome operator an isometry exactly when the
    graph is basic.  Maps H_inputs -> H_(rest).
    """
    i, j, m = _role_registers(g)
    support = _check_support(g.d, g.vertices, cap)
    measured = tuple(sorted(i + m)) if measured is None else tuple(sorted(measured))
    if not set(measured) <= set(i + m):
        raise ValueError("measured vertices must be inputs or measuring vertices")
    n = len(measured)
    outcome = np.zeros(n, np.int64) if outcome is None else field.as_field(outcome, g.d)
    if outcome.shape != (n,):
        raise IndexMismatch("outcome length does not match the measured set")
    prep = tuple(sorted(j + m))
    emb = embed_map(x_basis_vector(g.d, prep, cap=cap), support, cap=cap)
    dyn = dynamics_map(g, loops=loops, cap=cap)
    ext = extract_map(x_basis_vector(g.d, measured, outcome, cap=cap), support, cap=cap)
    out = ext @ dyn @ emb
    return LinearMap(g.d, out.domain, out.codomain, g.d ** (n / 2) * out.matrix)


def _admissible_registers(g: graphs.WeightedGraph):
    report = graphs.validate_admissible(g)
    if not report.admissible:
        raise NotAdmissible(
            f"graph is not admissible (g1={report.g1}, g2={report.g2}, g3={report.g3})")
    return g.inputs, g.outputs, g.auxiliary, g.syndrome


def _state_registers(g: graphs.WeightedGraph):
    """Registers for stabilizer bookkeeping: admissible, or a bare state
    graph (every vertex an output, a one-element code family)."""
    if g.vertices and set(g.roles) == {graphs.Role.OUTPUT}:
        return (), g.outputs, (), ()
    return _admissible_registers(g)


def graph_code_isometry(g: graphs.WeightedGraph, syndrome_outcome=None,
                        cap: int | None = None) -> LinearMap:
    """Code isometry H_inputs -> H_outputs of an admissible graph.

    Built by operator composition: plant the syndrome configuration in the
    z-basis, prepare outputs and auxiliaries in the standard state, run the
    dynamics, and project inputs, auxiliaries and syndromes onto the
    standard x-basis vector.
    """
    i, j, k, l = _admissible_registers(g)
    support = _check_support(g.d, g.vertices, cap)
    ql = (np.zeros(len(l), np.int64) if syndrome_outcome is None
          else field.as_field(syndrome_outcome, g.d))
    if ql.shape != (len(l),):
        raise IndexMismatch("syndrome outcome length does not match")
    plant = embed_map(z_basis_vector(g.d, l, ql, cap=cap), tuple(sorted(i + l)), cap=cap)
    emb = embed_map(x_basis_vector(g.d, tuple(sorted(j + k)), cap=cap), support, cap=cap)
    dyn = dynamics_map(g, cap=cap)
    ext = extract_map(x_basis_vector(g.d, tuple(sorted(i + k + l)), cap=cap), support, cap=cap)
    out = ext @ dyn @ emb @ plant
    scale = g.d ** ((len(j) + len(k)) / 2)
    return LinearMap(g.d, out.domain, out.codomain, scale * out.matrix)


def graph_code_expansion(g: graphs.WeightedGraph, syndrome_outcome=None,
                         cap: int | None = None) -> LinearMap:
    """The same isometry as an explicit z-basis phase sum.

    Matrix elements are quadratic-phase sums over auxiliary configurations,

        <q_J| v |q_I> ~ sum_{q_K} exp(i pi/d <q, G q>),

    computed directly from the loop-aware adjacency.  Independent of the
    operator-composition route in `graph_code_isometry`; the two must agree.
    """
    i, j, k, l = _admissible_registers(g)
    _check_support(g.d, g.vertices, cap)
    d = g.d
    ql = (np.zeros(len(l), np.int64) if syndrome_outcome is None
          else field.as_field(syndrome_outcome, d))
    m = weyl.loop_matrix(g)
    u = tuple(sorted(i + j + k))
    cfg = _configs(d, len(u))
    upos = [g.index(v) for v in u]
    lpos = [g.index(v) for v in l]
    quad = np.einsum("ki,ij,kj->k", cfg, m[np.ix_(upos, upos)], cfg)
    cross = 2 * cfg @ (m[np.ix_(upos, lpos)] @ ql)
    const = int(ql @ m[np.ix_(lpos, lpos)] @ ql)
    phases = np.exp(1j * np.pi / d * ((quad + cross + const) % (2 * d)))
    mat = np.zeros((d ** len(j), d ** len(i)), dtype=complex)
    np.add.at(mat, (_subindex(d, u, j), _subindex(d, u, i)), phases)
    mat *= d ** ((len(j) - 2 * len(i) - len(k) - len(l)) / 2)
    return LinearMap(d, i, j, mat)


def cluster_state(g: graphs.WeightedGraph, syndrome_outcome=None,
                  cap: int | None = None) -> StateVector:
    """The code vector of an admissible graph without input vertices.

    A graph whose vertices are all outputs describes a single state: the
    standard state entangled by one step of the dynamics.
    """
    if g.inputs:
        raise NotAdmissible("cluster states need a graph without input vertices")
    if g.vertices and set(g.roles) == {graphs.Role.OUTPUT}:
        _check_support(g.d, g.vertices, cap)
        return apply_dynamics(g, x_basis_vector(g.d, g.vertices, cap=cap))
    v = graph_code_isometry(g, syndrome_outcome, cap=cap)
    return StateVector(g.d, v.codomain, v.matrix[:, 0])


def stabilizer_labels(g: graphs.WeightedGraph) -> list[weyl.WeylLabel]:
    """Weyl labels generating the abelian algebra attached to an admissible graph.

    One label w(G[J, JK] q | q_J) per kernel element q of the block with
    rows inputs+auxiliary and columns outputs+auxiliary.
    """
    i, j, k, l = _state_registers(g)
    jk = tuple(sorted(j + k))
    kernel = field.kernel_elements(g.block(i + k, jk), g.d)
    mom_block = g.block(j, jk)
    labels = []
    for q in kernel:
        qj = q[[jk.index(v) for v in j]]
        labels.append(weyl.WeylLabel(g.d, j, (mom_block @ q) % g.d, qj))
    return labels


def character_exponent(g: graphs.WeightedGraph, q_jk, syndrome_outcome) -> int:
    """Phase exponent of the stabilizer eigenvalue on the q_L code space.

    The syndrome label enters the quadratic phase with a minus sign, which
    is forced by the shear convention used by the dynamics (for d = 2 the
    sign is invisible).
    """
    i, j, k, l = _state_registers(g)
    jk = tuple(sorted(j + k))
    ql = field.as_field(syndrome_outcome, g.d)
    support = tuple(sorted(jk + l))
    full = np.zeros(len(support), np.int64)
    for idx, v in enumerate(jk):
        full[support.index(v)] = field.as_field(q_jk, g.d)[idx]
    for idx, v in enumerate(l):
        full[support.index(v)] = (-ql[idx]) % g.d
    return weyl.tau_exponent(g, full, support=support)


@dataclass(frozen=True)
class DecompositionReport:
    isometric: bool
    orthogonal: bool
    complete: bool
    characters: bool
    max_deviation: float

    @property
    def passed(self) -> bool:
        return self.isometric and self.orthogonal and self.complete and self.characters


def check_stabilizer_decomposition(g: graphs.WeightedGraph, tol: float = 1e-10,
                                   cap: int | None = None) -> DecompositionReport:
    """Verify the full code decomposition attached to an admissible graph.

    Checks that every syndrome sector gives an isometry, that distinct
    sectors are orthogonal, that the sectors resolve the identity on the
    output register, and that each sector vector satisfies the stabilizer
    eigenvalue equations with the character phases.
    """
    i, j, k, l = _admissible_registers(g)
    d = g.d
    vs = {}
    dev = 0.0
    for ql in field.configurations(d, len(l)):
        vs[tuple(ql)] = graph_code_isometry(g, ql, cap=cap)
    eye_i = np.eye(d ** len(i))
    iso_dev = orth_dev = 0.0
    for ql, v in vs.items():
        iso_dev = max(iso_dev, float(np.max(np.abs((v.adjoint() @ v).matrix - eye_i))))
    for qa, va in vs.items():
        for qb, vb in vs.items():
            if qa < qb:
                orth_dev = max(orth_dev, float(np.max(np.abs((va.adjoint() @ vb).matrix))))
    total = sum((v @ v.adjoint()).matrix for v in vs.values())
    comp_dev = float(np.max(np.abs(total - np.eye(d ** len(j)))))
    jk = tuple(sorted(j + k))
    kernel = field.kernel_elements(g.block(i + k, jk), d)
    mom_block = g.block(j, jk)
    char_dev = 0.0
    for ql, v in vs.items():
        for q in kernel:
            qj = q[[jk.index(x) for x in j]]
            w = weyl_matrix(weyl.WeylLabel(d, j, (mom_block @ q) % d, qj), cap=cap)
            ev = weyl.phase_value(character_exponent(g, q, np.array(ql)), d)
            char_dev = max(char_dev, float(np.max(np.abs((w @ v).matrix - ev * v.matrix))))
    dev = max(iso_dev, orth_dev, comp_dev, char_dev)
    return DecompositionReport(iso_dev <= tol, orth_dev <= tol,
                               comp_dev <= tol, char_dev <= tol, dev)


# -- measurements -------------------------------------------------------------


def measurement_kraus(basis, subset, d: int, support,
                      cap: int | None = None) -> list[tuple[np.ndarray, LinearMap]]:
    """Kraus co-isometries of a projective measurement on part of a register.

    basis is "x", "z", or an admissible measurement graph without inputs
    whose outputs are exactly `subset` (outcomes then range over its
    syndrome configurations).
    """
    support = tuple(sorted(support))
    subset = tuple(sorted(subset))
    if not set(subset) <= set(support):
        raise IndexMismatch("measured vertices must lie in the register")
    out = []
    if basis == "x":
        for p in field.configurations(d, len(subset)):
            out.append((p, extract_map(x_basis_vector(d, subset, p, cap=cap), support, cap=cap)))
    elif basis == "z":
        for q in field.configurations(d, len(subset)):
            out.append((q, extract_map(z_basis_vector(d, subset, q, cap=cap), support, cap=cap)))
    elif isinstance(basis, graphs.WeightedGraph):
        if basis.inputs or tuple(sorted(basis.outputs)) != subset:
            raise NotAdmissible("measurement graph must have outputs == measured set, no inputs")
        for ql in field.configurations(d, len(basis.syndrome)):
            psi = cluster_state(basis, ql, cap=cap)
            out.append((ql, extract_map(psi, support, cap=cap)))
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return out


def measure_projective(basis, subset, psi: StateVector, rng=None, outcome=None,
                       cap: int | None = None):
    """Projective measurement of `subset` inside psi's register.

    Samples an outcome from the Born probabilities with `rng` (or
    post-selects `outcome` when given, raising ZeroProbability if that
    branch has no weight).  Returns (outcome, collapsed state on the
    complement register, probability).
    """
    kraus = measurement_kraus(basis, subset, psi.d, psi.support, cap=cap)
    branches = [(lbl, k @ psi) for lbl, k in kraus]
    probs = np.array([b.norm() ** 2 for _, b in branches])
    total = probs.sum()
    if not np.isclose(total, psi.norm() ** 2, rtol=1e-8, atol=1e-12):
        raise AssertionError("measurement branches do not resolve the state norm")
    if outcome is not None:
        want = field.as_field(outcome, psi.d)
        for (lbl, b), pr in zip(branches, probs):
            if np.array_equal(np.asarray(lbl) % psi.d, want):
                if pr < 1e-12:
                    raise ZeroProbability(f"outcome {want.tolist()} has probability 0")
                return np.asarray(lbl), b.normalized(), float(pr / total)
        raise ValueError(f"outcome {want.tolist()} not in the outcome set")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    idx = int(rng.choice(len(branches), p=probs / total))
    lbl, b = branches[idx]
    return np.asarray(lbl), b.normalized(), float(probs[idx] / total)


def equal_up_to_phase(a, b, tol: float = 1e-10) -> complex | None:
    """Phase kappa with |kappa| = 1 and max|a - kappa b| <= tol, else None.

    kappa is read off the first entry of b (row-major) larger than tol in
    modulus; if b vanishes entirely, a must too and kappa is 1.
    """
    a = a.matrix if isinstance(a, LinearMap) else np.asarray(a)
    b = b.matrix if isinstance(b, LinearMap) else np.asarray(b)
    if a.shape != b.shape:
        return None
    af, bf = a.ravel(), b.ravel()
    idx = np.nonzero(np.abs(bf) > tol)[0]
    if idx.size == 0:
        return 1.0 + 0j if np.max(np.abs(af), initial=0.0) <= tol else None
    kappa = af[idx[0]] / bf[idx[0]]
    mod = abs(kappa)
    if mod < tol:
        return None
    kappa = kappa / mod
    return complex(kappa) if np.max(np.abs(af - kappa * bf)) <= tol else None

"""One-way computing engine: strategy conversion, vertex elimination,
oracle-backed verification, simulated runs and persistency bounds.

A run prepares the non-input qudits in the standard state, entangles them
with one step of the graph dynamics, measures inputs and measuring
vertices in the x basis, and undoes the measurement randomness with the
Weyl byproduct of the graph's compensation map.  Measurements in other
bases are first rewritten as x measurements on a modified graph; the
standard-outcome channel is then computed purely graphically by
eliminating measuring vertices with Schur complements, with a local
Fourier transform recorded whenever an output vertex has to be traded for
a fresh partner.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import graphs, oracle, weyl
from .errors import IndexMismatch, NotAdmissible, NotBasic, NotBinary, VertexCollision
from .graphs import Role, WeightedGraph


# -- measurement strategies ----------------------------------------------------


@dataclass(frozen=True)
class XBasis:
    pass


@dataclass(frozen=True)
class YBasis:
    weight: int = 1


@dataclass(frozen=True)
class ZBasis:
    pass


@dataclass(frozen=True)
class GraphBasis:
    graph: WeightedGraph


Strategy = Mapping[int, "XBasis | YBasis | ZBasis | GraphBasis"]


@dataclass(frozen=True, eq=False)
class XGraphConversion:
    """Result of rewriting a measurement strategy as x measurements.

    graph: the converted graph; its measuring set is the measured vertices
        of the original graph plus any auxiliaries brought in by z or
        graph-basis measurements.
    loops: loop weights of `graph` (mod 2d); the subtraction of the
        measurement blocks is done on integer representatives.
    measurement_graph: the combined measurement-basis graph.
    outcome_shift: matrix S over F_d; for basis outcome q_L the equivalent
        x outcomes at the converted measuring vertices are S @ q_L.
    """

    original: WeightedGraph
    graph: WeightedGraph
    loops: np.ndarray
    measurement_graph: WeightedGraph
    outcome_shift: np.ndarray
    syndrome: tuple[int, ...]
    added_measuring: tuple[int, ...]


def strategy_to_x_graph(g: WeightedGraph, strategy: Strategy) -> XGraphConversion:
    """Rewrite per-vertex basis choices as x measurements on a new graph.

    Per measured vertex: x leaves the graph unchanged, y subtracts a
    self-link, z attaches (and then measures) a fresh auxiliary neighbor;
    an explicit measurement graph contributes its own block.  Fresh
    auxiliary and syndrome ids are the smallest unused integers, allocated
    auxiliaries first, in ascending order of the measured vertex.
    """
    if not graphs.is_basic(g):
        raise NotBasic("strategy conversion needs a basic interaction graph")
    measuring = g.measuring
    if set(strategy) != set(measuring):
        raise ValueError(
            f"strategy must cover exactly the measuring vertices {list(measuring)}")
    user_vertices: set[int] = set()
    for m, basis in strategy.items():
        if isinstance(basis, GraphBasis):
            user_vertices |= set(basis.graph.vertices) - set(basis.graph.outputs)
    if user_vertices & set(g.vertices):
        raise VertexCollision("measurement-graph ids collide with the interaction graph")
    fresh = (v for v in itertools.count(1)
             if v not in set(g.vertices) | user_vertices)

    lam_roles: dict[int, Role] = {}
    lam_edges: list[tuple[int, int, int]] = []
    aux_of: dict[int, int] = {}
    for m in measuring:  # auxiliaries first, so their ids precede syndromes
        if isinstance(strategy[m], ZBasis):
            aux_of[m] = next(fresh)
    syndromes: list[int] = []
    for m in measuring:
        basis = strategy[m]
        if isinstance(basis, GraphBasis):
            block = basis.graph
            if block.inputs or block.outputs != (m,):
                raise NotAdmissible(
                    f"measurement graph for vertex {m} must have outputs ({m},) and no inputs")
            if not graphs.validate_admissible(block).admissible:
                raise NotAdmissible(f"measurement graph for vertex {m} is not admissible")
            for v in block.vertices:
                lam_roles[v] = block.role(v)
            syndromes.extend(block.syndrome)
            for a, i in enumerate(block.vertices):
                for b in range(a, len(block.vertices)):
                    w = int(block.adjacency[a, b])
                    if w:
                        lam_edges.append((i, block.vertices[b], w))
            continue
        l = next(fresh)
        syndromes.append(l)
        lam_roles[m] = Role.OUTPUT
        lam_roles[l] = Role.SYNDROME
        if isinstance(basis, XBasis):
            lam_edges.append((m, l, 1))
        elif isinstance(basis, YBasis):
            w = int(basis.weight) % g.d
            if w:
                lam_edges.append((m, m, w))
            lam_edges.append((m, l, 1))
        elif isinstance(basis, ZBasis):
            k = aux_of[m]
            lam_roles[k] = Role.AUXILIARY
            lam_edges.append((m, k, 1))
            lam_edges.append((k, l, 1))
        else:
            raise ValueError(f"unknown basis {basis!r} for vertex {m}")
    lam = WeightedGraph.from_edges(g.d, lam_roles, lam_edges)
    report = graphs.validate_admissible(lam)
    if not report.admissible:
        raise NotAdmissible("combined measurement graph is not admissible")

    mk = tuple(sorted(lam.outputs + lam.auxiliary))
    support = tuple(sorted(set(g.vertices) | set(mk)))
    adj = (graphs.zero_extended(g, support)
           - graphs.zero_extended(graphs.delete_vertices(lam, lam.syndrome), support)) % g.d
    loops_g = np.zeros(len(support), np.int64)
    loops_lam = np.zeros(len(support), np.int64)
    for v, w in zip(g.vertices, graphs.default_loops(g)):
        loops_g[support.index(v)] = w
    for v, w in zip(lam.vertices, graphs.default_loops(lam)):
        if v in support:
            loops_lam[support.index(v)] = w
    loops = graphs.loops_after_difference(loops_g, loops_lam, g.d)
    roles = {v: (g.role(v) if v in g.vertices else Role.MEASURING) for v in support}
    for m in measuring:
        roles[m] = Role.MEASURING
    converted = WeightedGraph(g.d, support, tuple(roles[v] for v in support), adj)
    shift = lam.block(mk, lam.syndrome)
    return XGraphConversion(g, converted, loops, lam, shift,
                            tuple(sorted(lam.syndrome)), tuple(sorted(lam.auxiliary)))


# -- elimination ----------------------------------------------------------------


@dataclass(frozen=True)
class FourierRecord:
    """Single-vertex Fourier transform from `source` onto fresh `partner`."""

    source: int
    partner: int
    weight: int = 1


@dataclass(frozen=True, eq=False)
class EliminationStep:
    removed: tuple[int, ...]
    case: str  # "i" self-link, "ii" measuring pair, "iii" output partner
    graph_after: WeightedGraph
    loops_after: np.ndarray
    fourier: FourierRecord | None


@dataclass(frozen=True, eq=False)
class ReductionTrace:
    initial: WeightedGraph
    initial_loops: np.ndarray
    steps: tuple[EliminationStep, ...]

    @property
    def final(self) -> WeightedGraph:
        return self.steps[-1].graph_after if self.steps else self.initial

    @property
    def final_loops(self) -> np.ndarray:
        return self.steps[-1].loops_after if self.steps else self.initial_loops

    @property
    def fouriers(self) -> tuple[FourierRecord, ...]:
        return tuple(s.fourier for s in self.steps if s.fourier is not None)


def _choose_default(g: WeightedGraph):
    """Default elimination choice.

    Connected self-link-free measuring pairs go first (lowest ids), then
    self-linked measuring vertices, and only then the output-partner move;
    this is the order the worked reductions follow.
    """
    meas = g.measuring
    for n in meas:
        if g.has_self_link(n):
            continue
        for k in meas:
            if k != n and g.weight(n, k) and not g.has_self_link(k):
                return n, k, "ii"
    for n in meas:
        if g.has_self_link(n):
            return n, None, "i"
    for n in meas:
        for k in g.outputs:
            if g.weight(n, k):
                return n, k, "iii"
    raise NotBasic("no measuring vertex can be eliminated; graph is not basic")


def _choose_for(g: WeightedGraph, n: int):
    """Elimination case for a specific measuring vertex n."""
    if g.has_self_link(n):
        return n, None, "i"
    partners = [k for k in g.measuring if k != n and g.weight(n, k)]
    if partners:
        clean = [k for k in partners if not g.has_self_link(k)]
        return n, (clean or partners)[0], "ii"
    for k in g.outputs:
        if g.weight(n, k):
            return n, k, "iii"
    raise NotBasic(f"measuring vertex {n} cannot be eliminated; graph is not basic")


def eliminate(g: WeightedGraph, order=None, loops=None) -> ReductionTrace:
    """Remove every measuring vertex by repeated Schur complements.

    order, when given, lists vertex ids to eliminate first (each entry is
    taken together with an automatically chosen partner where needed).
    The trace records each removed set, its rule, the surviving graph with
    its loop weights, and the Fourier transform when an output vertex was
    exchanged for a fresh partner.
    """
    if not graphs.is_basic(g):
        raise NotBasic("elimination is defined for basic graphs")
    loops = graphs.default_loops(g) if loops is None else np.asarray(loops, np.int64) % (2 * g.d)
    trace_initial = g
    queue = [int(v) for v in order] if order is not None else None
    steps: list[EliminationStep] = []
    current, cur_loops = g, loops
    while current.measuring:
        if queue:
            pending = [v for v in queue if v in current.measuring]
            if pending:
                n, k, case = _choose_for(current, pending[0])
            else:
                n, k, case = _choose_default(current)
        else:
            n, k, case = _choose_default(current)
        fourier = None
        work, work_loops = current, cur_loops
        if case == "iii":
            partner = max(work.vertices) + 1
            work = graphs.join_connecting(work, {k: partner})
            work_loops = np.zeros(len(work.vertices), np.int64)
            for v, w in zip(current.vertices, cur_loops):
                work_loops[work.vertices.index(v)] = w
            fourier = FourierRecord(source=k, partner=partner, weight=1)
        removed = (n,) if case == "i" else (n, k)
        nxt, nxt_loops = graphs.schur_complement_loops(work, removed, work_loops)
        if not graphs.is_basic(nxt):
            raise NotBasic(f"elimination of {removed} did not preserve the basic property")
        steps.append(EliminationStep(removed, case, nxt, nxt_loops, fourier))
        current, cur_loops = nxt, nxt_loops
    return ReductionTrace(trace_initial, loops, tuple(steps))


# -- oracle verification ---------------------------------------------------------


@dataclass(frozen=True)
class StepCheck:
    removed: tuple[int, ...]
    case: str
    kappa: complex | None
    deviation: float

    @property
    def passed(self) -> bool:
        return self.kappa is not None


@dataclass(frozen=True)
class ReductionReport:
    steps: tuple[StepCheck, ...]
    end_to_end: StepCheck
    max_deviation: float

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.steps) and self.end_to_end.passed


def _phase_alignment(a, b, tol):
    a = a.matrix if isinstance(a, oracle.LinearMap) else np.asarray(a)
    b = b.matrix if isinstance(b, oracle.LinearMap) else np.asarray(b)
    if a.shape != b.shape:
        return None, float("inf")
    idx = np.nonzero(np.abs(b.ravel()) > tol)[0]
    if idx.size == 0:
        dev = float(np.max(np.abs(a)))
        return (1.0 + 0j, dev) if dev <= tol else (None, dev)
    kappa = a.ravel()[idx[0]] / b.ravel()[idx[0]]
    if abs(kappa) < tol:
        return None, float(np.max(np.abs(a)))
    kappa = kappa / abs(kappa)
    dev = float(np.max(np.abs(a - kappa * b)))
    return (complex(kappa), dev) if dev <= tol else (None, dev)


def _fourier_operator(rec: FourierRecord, register, d, cap=None) -> oracle.LinearMap:
    small = oracle.fourier_map(np.array([[rec.weight]]), (rec.partner,), (rec.source,), d, cap=cap)
    return small.promote(tuple(sorted(v for v in register if v != rec.source)))


def verify_reduction(trace: ReductionTrace, tol: float = 1e-10,
                     cap: int | None = None) -> ReductionReport:
    """Check every elimination step against the dense oracle.

    Per step: the encoding operator of the graph before the step (composed
    with the recorded Fourier transform for an output exchange) must equal
    the encoding operator of the graph after it, up to a global phase.
    End to end: the accumulated Fourier transforms applied to the initial
    operator must match the final graph's operator the same way.
    """
    d = trace.initial.d
    checks = []
    cur, cur_loops = trace.initial, trace.initial_loops
    total = oracle.encoding_operator(cur, loops=cur_loops, cap=cap)
    acc = total
    for step in trace.steps:
        u_before = oracle.encoding_operator(cur, loops=cur_loops, cap=cap)
        lhs = u_before
        if step.fourier is not None:
            f_op = _fourier_operator(step.fourier, u_before.codomain, d, cap=cap)
            lhs = f_op @ u_before
            acc = _fourier_operator(step.fourier, acc.codomain, d, cap=cap) @ acc
        u_after = oracle.encoding_operator(step.graph_after, loops=step.loops_after, cap=cap)
        kappa, dev = _phase_alignment(lhs, u_after, tol)
        checks.append(StepCheck(step.removed, step.case, kappa, dev))
        cur, cur_loops = step.graph_after, step.loops_after
    u_final = oracle.encoding_operator(trace.final, loops=trace.final_loops, cap=cap)
    kappa, dev = _phase_alignment(acc, u_final, tol)
    end = StepCheck((), "total", kappa, dev)
    devs = [c.deviation for c in checks] + [end.deviation]
    return ReductionReport(tuple(checks), end, max(devs) if devs else 0.0)


# -- simulated runs ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RunRecord:
    seed: int | None
    measured: tuple[int, ...]
    outcomes: np.ndarray
    byproducts: tuple[weyl.WeylLabel, ...]
    output: oracle.StateVector
    probability: float


def run(g: WeightedGraph, strategy: Strategy | None = None,
        input_state: oracle.StateVector | None = None, seed: int | None = None,
        compensate: bool = True, cap: int | None = None) -> RunRecord:
    """Simulate one full round on the dense oracle.

    The strategy (default: x everywhere) is first rewritten as x
    measurements; the run then prepares, entangles, measures inputs and
    measuring vertices with Born-sampled outcomes, and, with `compensate`,
    applies the byproduct Weyl operator that maps the sampled branch back
    to the standard-outcome branch (up to a phase, for every seed).
    """
    strategy = {m: XBasis() for m in g.measuring} if strategy is None else strategy
    conv = strategy_to_x_graph(g, strategy)
    g0, loops = conv.graph, conv.loops
    theta = weyl.compensation_map(g0) if compensate else None
    inputs = g0.inputs
    if inputs:
        if input_state is None:
            raise ValueError("graphs with input vertices need an input state")
        if input_state.support != inputs or input_state.d != g.d:
            raise IndexMismatch("input state must live on the input register")
        psi = input_state
    else:
        psi = oracle.StateVector(g.d, (), np.ones(1))
    prep = tuple(sorted(g0.outputs + g0.measuring))
    full = oracle.embed_map(oracle.x_basis_vector(g.d, prep, cap=cap), g0.vertices, cap=cap) @ psi
    full = oracle.apply_dynamics(g0, full, loops=loops)
    measured = tuple(sorted(inputs + g0.measuring))
    rng = np.random.default_rng(seed)
    outcome, collapsed, prob = oracle.measure_projective("x", measured, full, rng=rng, cap=cap)
    byproducts: tuple[weyl.WeylLabel, ...] = ()
    output = collapsed
    if compensate:
        # the sampled branch is w(Theta p) times the standard branch, so the
        # correction is the adjoint of the byproduct label
        correction = weyl.byproduct(theta, outcome).adjoint()
        output = oracle.apply_weyl(correction, collapsed)
        byproducts = (correction,)
    return RunRecord(seed, measured, outcome, byproducts, output, prob)


# -- persistency -------------------------------------------------------------------


def _measure_one(g: WeightedGraph, v: int, basis: str) -> WeightedGraph:
    """Apply a single-vertex x/y/z measurement to a state graph, graphically."""
    if basis == "z" or not g.neighbors(v) and not g.has_self_link(v):
        return graphs.delete_vertices(g, (v,))
    work = g.with_roles({v: Role.MEASURING})
    if basis == "y":
        adj = work.adjacency.copy()
        adj.flags.writeable = True
        i = work.index(v)
        adj[i, i] = (adj[i, i] + 1) % 2
        work = WeightedGraph(work.d, work.vertices, work.roles, adj)
    elif basis != "x":
        raise ValueError(f"unknown basis {basis!r}")
    return eliminate(work).final


def is_product_graph(g: WeightedGraph) -> bool:
    """No edges between distinct vertices (self-links allowed)."""
    off = g.adjacency.copy()
    np.fill_diagonal(off, 0)
    return not off.any()


def persistency_upper_bound(g: WeightedGraph, budget: int) -> int | None:
    """Shortest sequence of single-vertex x/y/z measurements (length <=
    budget) whose graphical rewrite leaves a product graph; None if the
    budget is exhausted first.

    Breadth-first over (vertex, basis) moves with exact-graph deduplication,
    so this is an upper bound on the persistency of the state.
    """
    if g.d != 2:
        raise NotBinary("the persistency search uses the qubit rewrite rules")
    if set(g.roles) - {Role.OUTPUT}:
        raise ValueError("persistency applies to state graphs (all vertices outputs)")
    if is_product_graph(g):
        return 0
    frontier = {g.key(): g}
    for depth in range(1, int(budget) + 1):
        nxt: dict = {}
        for cur in frontier.values():
            for v in cur.vertices:
                for basis in ("x", "y", "z"):
                    h = _measure_one(cur, v, basis)
                    if is_product_graph(h):
                        return depth
                    nxt.setdefault(h.key(), h)
        frontier = nxt
    return None

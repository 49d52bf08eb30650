"""Qudit cluster-state calculus over prime fields.

Weighted graphs over F_d describe entanglement resources and stabilizer
codes; local measurements act on them by Schur-complement elimination, and
measurement randomness is undone by Weyl byproduct operators.  Every
symbolic rule is backed by a dense Hilbert-space oracle at small scale.
"""

from . import cli, document, field, oracle, pipeline, weyl
from .errors import (
    GraphclustError,
    IndexMismatch,
    InvalidSubset,
    NotAdmissible,
    NotBasic,
    NotBinary,
    NotInvertible,
    NotInvertibleBlock,
    NotSurjective,
    ParseError,
    PreconditionViolated,
    SizeCapExceeded,
    VertexCollision,
    ZeroProbability,
)
from .graphs import (
    AdmissibilityReport,
    Removability,
    Role,
    WeightedGraph,
    binary_rule,
    default_loops,
    delete_vertices,
    is_basic,
    join_connecting,
    removability_class,
    schur_complement,
    schur_complement_loops,
    validate_admissible,
)
from .oracle import (
    LinearMap,
    StateVector,
    apply_dynamics,
    apply_weyl,
    check_stabilizer_decomposition,
    cluster_state,
    dynamics_map,
    encoding_operator,
    equal_up_to_phase,
    fourier_map,
    graph_code_expansion,
    graph_code_isometry,
    measure_projective,
    weyl_matrix,
    x_basis_vector,
    z_basis_vector,
)
from .pipeline import (
    GraphBasis,
    ReductionTrace,
    RunRecord,
    XBasis,
    YBasis,
    ZBasis,
    eliminate,
    persistency_upper_bound,
    run,
    strategy_to_x_graph,
    verify_reduction,
)
from .weyl import (
    CompensationMap,
    WeylLabel,
    byproduct,
    chi_exponent,
    compensation_map,
    phase_value,
    symplectic_form,
    tau_exponent,
    weyl_compose,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

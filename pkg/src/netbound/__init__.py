"""Boundedness certificates for semi-passive networks coupled over digraphs.

The package certifies that every trajectory of ``xdot_i = f_i(x_i) + u_i``
under diffusive coupling ``u_i = -gamma * sum_j a_ij (x_i - x_j)`` stays
bounded -- uniformly in the coupling gain -- whenever each node carries a
dissipation certificate and the graph has a directed spanning tree.  It
builds the leader/follower Laplacian decomposition, the associated Lyapunov
matrices, every bound constant, and a simulation harness that cross-checks
the certified radii against integrated trajectories.
"""

from .certificate import (
    BoundCertificate,
    CertificateError,
    CertificateInputs,
    UniformityReport,
    certificate_inputs,
    check_uniformity,
    compute_certificate,
    all_time_constants,
    follower_constants,
    format_certificate,
    leader_constants,
)
from .digraph import (
    ConnectivityError,
    ConnectivityVerdict,
    DiGraph,
    LaplacianDecomposition,
    build_laplacian,
    check_assumption_connectivity,
    decompose,
    strongly_connected_components,
)
from .matrixlab import (
    DEFAULT_TOL,
    EigenConvergenceError,
    FollowerLyapunovData,
    LeaderLyapunovData,
    Tolerances,
    follower_lyapunov,
    is_nonsingular_m_matrix,
    is_z_matrix,
    leader_lyapunov,
    left_null_eigenvector,
    spectral_norm,
    symmetric_eigenvalues,
)
from .netspec import (
    NetworkSpec,
    SpecFormatError,
    build_graph,
    build_nodes,
    load_network_spec,
    parse_network_spec,
    sample_initial_conditions,
    save_network_spec,
)
from .nodes import (
    KInfFunction,
    SemiPassiveNode,
    VerificationResult,
    builtin_model_names,
    builtin_node,
    invert_kinf,
    verify_semipassive,
)
from .simulator import (
    BoundednessMetrics,
    ConsensusReport,
    DivergenceError,
    StepSizeError,
    Trajectory,
    ValidationReport,
    leader_storage_decrease_violations,
    linear_consensus_suite,
    measure,
    simulate,
    validate_certificate,
    write_csv,
)

__version__ = "0.1.0"

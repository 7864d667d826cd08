"""l1-synthesis with coherent frames via optimal-dual l1-analysis."""
from .diagnostics import (
    BoundReport,
    ConditionReport,
    DecayProfile,
    bound_rhs,
    check_sufficient_condition,
    decay_profile,
    lifted_delta,
    relative_error,
    s_term_tail,
    scan_sufficient_condition,
)
from .frames import (
    DegenerateSignalError,
    Dictionary,
    DualFrame,
    NotAFrameError,
    Projector,
    build_gabor_dictionary,
    build_spike_fourier_dictionary,
    canonical_dual,
    coherence,
    frame_bounds,
    general_dual,
    null_space_projector,
    optimal_dual_from_solution,
)
from .rng import make_rng
from .sensing import (
    DRIPEstimate,
    GroundTruth,
    SensingEnsemble,
    drip_estimate,
    gaussian_sensing_matrix,
    measure,
    synthesize_sparse_signal,
)
from .solver import (
    REFERENCE_CONFIG,
    EquivalenceReport,
    RecoveryResult,
    SolverConfig,
    SolverError,
    brute_force_basis_pursuit,
    soft_shrink,
    solve,
    solve_fixed_dual,
    verify_equivalence,
)

__version__ = "0.1.0"

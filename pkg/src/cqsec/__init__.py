"""Security diagnostics for classical-quantum key ensembles.

Quantifies how close a keyed ensemble sits to the ideal uniform key via
the trace-distance criterion, runs optimal and heuristic eavesdropper
attacks against whole keys, subsets, and known-plaintext targets, and
evaluates every guaranteed bound against achieved attack performance.
"""

from .attacks import (
    AttackSpec,
    compare_to_bounds,
    kpa_average_success,
    posterior_deviation,
    run_attack,
)
from .bounds import (
    BoundReport,
    FailureBudget,
    accessible_information_classical,
    binary_entropy,
    entropy_lower_bound,
    fano_ber_deviation,
    fano_ber_floor,
    holevo_bound,
    inverse_binary_entropy,
    markov_failure_budget,
    sequence_error_bound,
    shannon_entropy,
    variational_distance,
)
from .discrimination import (
    AttackResult,
    Povm,
    PovmElement,
    evaluate_measurement,
    helstrom_binary,
    map_success_classical,
    optimal_povm,
    per_bit_optimal_ber,
    pretty_good_measurement,
    ykl_residual,
)
from .ensemble import (
    CqEnsemble,
    EnsembleEntry,
    PairwiseDistanceReport,
    average_state,
    build_biased_classical,
    build_biased_ensemble,
    build_ideal_ensemble,
    build_locking_example,
    build_random_ensemble,
    compute_d,
    compute_d_joint,
    condition_on_known,
    marginalize_subset,
    pairwise_distance_checks,
)
from .linalg import (
    Spectrum,
    hermitian_eig,
    is_positive_semidefinite,
    projector,
    tensor,
    trace_norm,
    von_neumann_entropy,
)

__version__ = "0.1.0"

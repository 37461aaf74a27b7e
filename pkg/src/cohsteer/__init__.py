"""Coherence complementarity, coherence steering and non-local speed limits for qubits."""
from .bipartite import (
    PAULI_TRIAD,
    ConditionalEnsemble,
    MeasurementTriad,
    TwoQubitState,
    conditional_ensemble,
    linear_entropy_of_marginal,
    local_filter,
    psi_alpha_state,
    sample_separable,
    singlet,
    werner_state,
)
from .coherence import (
    RELATIVE_ENTROPY_BOUND,
    Axis,
    Measure,
    complementarity_sum,
    l1_coherence,
    relative_entropy_coherence,
    skew_coherence,
)
from .qsl import (
    EXAMPLE_TRIPLE,
    Observable,
    ObservableTriple,
    affinity,
    complementarity_constant,
    nonlocal_qsl_functional,
    observable_skew,
    qsl_bound,
)
from .qubit_core import QubitState, binary_entropy, bloch_to_density, density_to_bloch
from .steering import (
    SteeringReport,
    filter_sweep,
    mub_scan,
    separable_harness,
    steering_functional,
    werner_threshold,
)

__version__ = "0.1.0"

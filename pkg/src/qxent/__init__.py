"""Quantum cross entropy, empirical density matrices and likelihood-based state estimation."""

__version__ = "0.1.0"

from .entropy import (  # noqa: E402
    BoundChain,
    ClassicalDist,
    bound_chain,
    classical_cross_entropy,
    classical_fidelity,
    kl_divergence,
    quantum_cross_entropy,
    quantum_fidelity,
    quantum_relative_entropy,
    shannon,
    von_neumann,
)
from .empirical import (  # noqa: E402
    EmpiricalState,
    MeasurementDataset,
    avg_log_likelihood,
    empirical_operator,
    empirical_state,
    sample_dataset,
)
from .measurement import (  # noqa: E402
    Povm,
    ProjectiveMeasurement,
    TomographicSet,
    measurement_from_observable,
    pauli_tomographic_set,
)
from .mle import (  # noqa: E402
    CrossEntropyMinimizer,
    LinearInversionTomography,
    MaxLikelihoodTomography,
    linear_inversion,
    maximize_likelihood,
    minimize_cross_entropy,
)
from .states import (  # noqa: E402
    DensityMatrix,
    PureState,
    density_from_matrix,
    pure,
    random_density,
    random_pure,
    random_unitary,
    trace_distance,
)

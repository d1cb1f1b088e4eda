"""Simulation of a secret-sharing protocol whose success is controlled by a quantum cloner."""

from .cloning import (
    CloningParams,
    CoefficientSet,
    NamedPair,
    clone_isometry,
    coefficient_set,
    global_output_state,
    reduced_state,
    verify_reduced_against_global,
)
from .entanglement import (
    W1,
    W2,
    concurrence_mixed,
    critical_concurrence,
    ppt_entangled,
    witness,
    witness_value,
)
from .protocol import (
    alice_measure,
    discrimination_operators,
    run_trials,
    shared_state,
    success_probability,
)
from .states import SchmidtSpectrum, bell_encode, concurrence_pure, schmidt_state, werner_decompose

__version__ = "0.1.0"

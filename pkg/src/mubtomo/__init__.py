"""Mutually unbiased bases and photonic spatial-qudit tomography."""

from .kernels import BACKEND
from .fixtures import load_fixture
from .measurement import (
    CountTable,
    EmptyBasisError,
    NoiseModel,
    ProbabilityTable,
    ideal_probabilities,
    normalize_counts,
    optical_probabilities,
    simulate_counts,
    single_pattern_probabilities,
)
from .mub import (
    CertificationError,
    ModulationSetting,
    MubBasis,
    MubFamily,
    dim8_mub_family,
    prime_mub_family,
    prime_mub_vector,
    vector_to_modulation,
    verify_family,
)
from .optics import (
    ApertureGeometry,
    BeamProfile,
    DetectorConfig,
    SlmModulation,
    apply_phase,
    beam_amplitudes,
    count_rate,
    modulated_rate,
    pattern,
    prepare_state,
)
from .qudit import QuditVector, qubit_labels
from .tomography import (
    DensityOperator,
    FidelityEstimate,
    ReconstructionResult,
    fidelity,
    fidelity_with_errors,
    force_physical,
    force_purity,
    linear_reconstruct,
    purity,
    reconstruct,
)

__version__ = "0.1.0"

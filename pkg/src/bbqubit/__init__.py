"""Polarization-qubit decoherence in a dispersive ring cavity and its
suppression by bang-bang Pauli-group decoupling."""

from .analytics import (
    SphereSampling,
    alpha_bb,
    alpha_dot0,
    alpha_fe,
    asymptotic_value,
    axis_bb,
    axis_fe,
    bloch_average,
    first_order_infidelity,
    linearized_output,
    purity_closed_form,
    small_n_infidelity,
)
from .cavity import (
    CavityConfig,
    Mode,
    QuadratureScheme,
    SpectrumModel,
    evolve,
    evolve_monte_carlo,
    mc_phi_samples,
    round_trip_unitary,
)
from .detection import CountsRecord, DetectionConfig, build_histogram, detection_mu, integrate_peaks, sample_counts
from .fitting import fit_joint, fit_sigma_phi
from .qubit import (
    PolarizationState,
    angle_axis_of,
    bloch_vector,
    density_from_bloch,
    fidelity,
    mixed_fidelity,
    purity,
    rotation_unitary,
)
from .tomography import NoSignalError, TomographyInput, ml_reconstruct

__version__ = "0.1.0"

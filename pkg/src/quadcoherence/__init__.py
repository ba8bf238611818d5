"""Quadrature coherence of single-mode states under beam-splitter conditioning."""

from .analytic import gaussian_l1, output_l1, output_l1_y, thermal_l1
from .coherence import (
    CoherenceValue,
    FockMixture,
    l1_coherence,
    l1_coherence_pure,
    rel_entropy_coherence_fock_mixture,
    rel_entropy_coherence_pure,
)
from .conditioning import (
    BeamSplitter,
    SweepGrid,
    average_coherence,
    conditional_coherence,
    conditional_state,
    conditional_unnormalized,
    outcome_density,
    reduced_state,
    single_photon_entropy_scan,
)
from .numquad import IntegrationConfig, IntegrationError, QuadResult, integrate_1d, integrate_2d
from .states import (
    DensityKernel,
    GaussianSchellParams,
    WaveFunction,
    fock_wavefunction,
    gaussian_schell_kernel,
    parse_state,
    pure_kernel,
    squeezed_wavefunction,
    thermal_params,
)

__version__ = "0.1.0"

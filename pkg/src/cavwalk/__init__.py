"""Coined quantum walks on the line with a cavity-driven coin.

Core modules:

* `operators`: Pauli/Bloch helpers, Fock ladder operators, state validation.
* `walk`: density-matrix evolution of the repeated-substep walk, position
  distributions, and the independent phase-space route.
* `cavity`: resonant atom-field channels (JCM and deformations) that
  pre-process the coin.
* `asymptotics`: scaling function, arcsine limit law, resonance times and
  the classical diffusive branch.
* `service` / `cli`: HTTP surface and its thin command-line client.
"""

from .asymptotics import (
    ArcsineLaw,
    DrivenAmplitudes,
    RESONANCE_EPS,
    amplitudes_for_cavity,
    classical_variance_rate,
    coin_for_walk,
    driven_amplitudes,
    ks_distance,
    limit_cdf,
    limit_moment,
    limit_pdf,
    pdf_normalization,
    resonance_branch,
    resonance_times,
    weak_limit_derivative,
    weak_limit_harmonic,
    weak_limit_trace,
)
from .cavity import CavityModel, CavityVariant, apply_cavity, channel_via_unitary, jc_unitary, kraus_triple, output_bloch, rabi_angles
from .operators import (
    bloch_from_density,
    check_density_matrix,
    coin_rotation,
    coin_state_from_angle,
    density_from_bloch,
    fock_operators,
)
from .walk import (
    PositionDistribution,
    WalkConfig,
    WalkerState,
    characteristic_function,
    classical_jump_distribution,
    distribution_via_phase,
    evolve,
    position_distribution,
    scaled_moment,
    step_channel,
    step_channel_joint,
    substep_unitary,
    walker_at_origin,
)

__version__ = "0.1.0"

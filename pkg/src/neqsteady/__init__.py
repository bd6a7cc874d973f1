"""Steady states of harmonic-oscillator networks driven by several heat baths.

The Born-Markov master equation is built in the normal-mode basis with all
inter-mode dissipator terms kept (or dropped, for the rotating-wave
comparison), mapped to a linear drift/diffusion equation for the Gaussian
characteristic function, and solved for its unique steady state.
"""

from __future__ import annotations

from .adiabatic import (
    ClosedFormReport,
    EndBaths,
    ReducedModel,
    closed_form_steady,
    degeneracy_gap,
    eliminate_bus,
    reduced_from_detuning,
    reduced_spec,
    two_mode_basis,
)
from .dissipators import (
    DissipatorSet,
    LocalRates,
    build_dissipators,
    gain_loss_gap,
    local_coefficients,
    local_rates,
    planck_occupation,
)
from .errors import (
    ConfigError,
    DomainError,
    DuplicateCoupling,
    ModelError,
    NegativeOccupation,
    NeqSteadyError,
    NoConvergence,
    NonPositiveSpectrum,
    NotConverged,
    NotDegenerate,
    NotHermitian,
    ResonantBus,
    Singular,
    SpecError,
    StepTooLarge,
    UndampedMode,
)
from .linalg import hermitian_eigen, lu_solve
from .model import Bath, Coupling, NormalModeBasis, SystemSpec, build_omega, chain, normal_modes, splittings, two_mode
from .phasespace import (
    DriftDiffusion,
    QuadraticForm,
    SteadyReport,
    build_drift_diffusion,
    effective_temperature,
    evolve_transient,
    extract_report,
    local_drift_diffusion,
    solve_steady,
    steady_state,
    thermal_form,
    to_local,
)

__version__ = "0.1.0"

"""Spectral toolkit for the clamped-free string with Kelvin-Voigt damping.

Closed-form eigenstructure and its biorthogonal dual family, exact modal
simulation under boundary and in-domain disturbances, an independent
finite-difference cross-check, and numerically verifiable stability
certificates for the energy-norm trajectory bounds.
"""

from .certificate import (IssCertificate, VerificationReport, asymptotic_check,
                          certificate, decay_rate, gamma_prime_sum, gamma_sum,
                          iss_bound_l2, iss_bound_uniform, verify_trajectory)
from .errors import (AssumptionViolated, CompatibilityViolated, ConfigError,
                     GridMismatch, GridTooCoarse, HorizonTooShort,
                     KvStringError, NonPositiveCoefficient,
                     RieszConstantDegenerate, StepUnstableOrSingular,
                     TruncationInsufficient)
from .fd import FdConfig, energy_series, simulate_fd
from .modal import (SimulationConfig, Trajectory, check_compatibility,
                    integrate_mode, modal_forcing, save_trajectory_csv,
                    simulate_spectral, truncation_bound)
from .signals import (BoundarySignal, DecayingExpBoundary, DistributedSignal,
                      PolyPulseBoundary, SampledBoundary, SampledDistributed,
                      SeparableDistributed, SineBoundary, SpatialProfile,
                      ZeroBoundary, ZeroDistributed, sine_mode_profile)
from .spectrum import (ModeData, ModeIndex, StringParams, char_poly_residual,
                       cross_inner_product, eigenfunction_samples, eigenvalue,
                       mode_data, mode_list, riesz_constant, validate_params)
from .state import (CoefficientSet, StateVector, apply_generator,
                    apply_inverse_generator, boundary_trace, coefficient_set,
                    gram_energy, h_inner, h_norm, lift_boundary, project,
                    reconstruct, riesz_sandwich_check, save_state_csv,
                    semigroup_apply, uniform_grid, zero_state)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"

"""Exactly solvable Jaynes-Cummings dynamics beyond the rotating-wave
approximation, built through a squeezing transformation and a
Lewis-Riesenfeld invariant, with numerical cross-checks."""

from .hilbert import QOperator, QState, Truncation
from .invariant import (
    AuxiliaryAngles,
    SolutionSpec,
    SubspaceLabel,
    assemble_full_solution,
    assemble_rwa_solution,
    invariant_operator,
    n_prime_operator,
    phase_integrand,
    solve_auxiliary_angles,
    v_transformation,
)
from .model import (
    TransformedCoefficients,
    build_full_hamiltonian,
    build_rwa_hamiltonian,
    build_transformed_hamiltonian,
)
from .propagator import convergence_check, observables, propagate
from .schedules import CoefficientSet, Constant, Harmonic, Polynomial, Schedule, Tabulated
from .squeezing import (
    SqueezedFrame,
    SqueezeTrajectory,
    numeric_transformed_hamiltonian,
    solve_constraints_forward,
    squeeze_operator,
    transform_coefficients,
    verify_constraints,
)

__version__ = "0.1.0"

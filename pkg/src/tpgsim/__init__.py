"""Truncated Fock-space simulator for triple-photon generation experiments."""

__version__ = "0.1.0"

from .errors import (ConfigError, InvalidStateError, NumericalError,
                     TpgError, TruncationError, UsageError)
from .fock import (DensityOperator, ModeLayout, SparseOperator, StateVector,
                   basis_state, build_ladder, coherent_state, number_operator,
                   partial_trace, partial_transpose, product_state,
                   read_snapshot, vacuum_state, write_snapshot)
from .dynamics import (HamiltonianSpec, build_hamiltonian,
                       classical_coefficients, correlated_pure_state, evolve,
                       pump_sector_amplitudes, pump_traced_matrix,
                       trajectory_solver, xi_to_time)
from .gaussian import (CovarianceMatrix, covariance_of, gaussian_entropy,
                       ppt_min_symplectic, steering_R,
                       symplectic_eigenvalues)
from .measures import (correlated_measures, log_negativity,
                       photon_statistics, qre, quadrature_marginal,
                       von_neumann_entropy, wigner_single, wigner_slice)
from .conditioning import (conditional_sweep, conditional_sweep_correlated,
                           homodyne_project)
from .experiments import ExperimentConfig, run_all

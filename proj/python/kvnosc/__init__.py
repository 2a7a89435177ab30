"""Koopman-von Neumann propagation of time-dependent harmonic oscillators."""

from ._core import (
    AnalyticAuxiliary,
    Check,
    CentrePoint,
    ConfigError,
    DegenerateInvariant,
    DensityGrid,
    DomainError,
    ErmakovSolution,
    ErmakovState,
    Error,
    EtaMap,
    ExtrapolationError,
    FrequencyProfile,
    GaussianState,
    GridWindow,
    InitialData,
    NotAdvection,
    OutOfRange,
    Report,
    RhoCollapse,
    Scenario,
    SolverOptions,
    UnsupportedProfile,
    alpha_from_rho,
    analytic_rho,
    analytic_u,
    assemble_full_propagator,
    centre_trajectory,
    classical_invariant,
    compare_centre_files,
    convergence_order,
    default_window,
    eta_at,
    evaluate_grid,
    gamma_at,
    invariance_residual,
    load_scenario_file,
    omega_rho_from_u,
    oracle,
    parse_scenario,
    preset,
    preset_names,
    read_csv,
    resolving_grid_size,
    run_evolve,
    run_solve_ermakov,
    run_trajectory,
    run_verification,
    solve,
    verify_disentangling,
)

__version__ = "0.1.0"

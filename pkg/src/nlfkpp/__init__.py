"""Nonlocal Fisher-KPP toolbox: solver, bound constants, entropy monitoring,
two-speed kinetic limit, and an experiment harness."""

from .bounds import (
    BoundInputs,
    BoundReport,
    IterationProblem,
    check_iteration_bound,
    critical_alpha,
    iteration_bound,
    iteration_bound_log2,
    sup_bound,
)
from .config import (
    ConstantTimesNoise,
    CustomInitial,
    DiagnosticsConfig,
    ExperimentConfig,
    FrontInitial,
    OscillatoryBump,
    config_from_dict,
    config_to_dict,
    load_config,
)
from .kinetic import (
    KineticConfig,
    KineticState,
    diffusion_coefficient,
    interaction_operator,
    isotropic_state,
    kinetic_limit_study,
    kinetic_run,
    kinetic_step,
    turning_operator,
)
from .lyapunov import (
    HairTriggerReport,
    LyapunovConfig,
    MonitorReport,
    PatternMetrics,
    admissible_delta_max,
    diagnose_hair_trigger,
    entropy_density,
    monitor_entropy_inequality,
    pattern_metrics,
    windowed_dissipation,
    windowed_entropy,
)
from .model import (
    DirichletExtension,
    Field,
    Grid1D,
    Kernel,
    ModelParams,
    Periodic,
    front_initial_condition,
    kernel_evaluate,
    rescale_to_mu,
    rescale_to_sigma,
    steady_state,
)
from .presets import PRESET_NAMES, preset_config, run_preset
from .solver import (
    BlowUpDetected,
    CompletedBounded,
    DtUnderflow,
    RunOutcome,
    SolverConfig,
    convolve,
    rhs,
    run,
    step,
)
from .sweep import bisect, scan

__version__ = "0.1.0"

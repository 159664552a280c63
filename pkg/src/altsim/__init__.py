"""altsim: spatial host-parasite dynamics with an altruistic defense trait.

A simulation and analytics toolkit covering the full model hierarchy:
microscopic stochastic Lotka-Volterra demes, the Wright-Fisher diffusion
limit of the altruist frequency with frequency-dependent migration, the
mean-field / law-dependent limit, and the closed-form stationary, fixation,
and invasion theory, with desk-scale numerical verification of each layer.
"""

from .errors import (
    AltsimError,
    ConfigError,
    DegenerateEquilibrium,
    DomainError,
    EmptySample,
    InsufficientReplicas,
    InvalidSize,
    NonFiniteState,
    QuadratureFailure,
    ShapeMismatch,
    ThetaOutOfRange,
)
from .model_core import (
    AssumptionReport,
    DemeGraph,
    EcologyParams,
    LimitConstants,
    ParamsBundle,
    ScalingParams,
    build_deme_graph,
    check_assumptions,
    derive_limit_constants,
    equilibrium_derivatives,
    equilibrium_pair,
    equilibrium_pair_rational,
    load_params,
    parse_params,
)
from .sde import (
    EnsembleStats,
    HistogramReducer,
    IntegratorConfig,
    MeanVarReducer,
    Path,
    RngStream,
    SdeModel,
    UserStatReducer,
    ensemble,
    integrate,
    run_batch,
    run_batch_records,
    scalar_model,
)
from .micro import (
    AcpState,
    HfpState,
    ScalingSchedule,
    acp_model,
    acp_run_records,
    equilibrium_hfp_state,
    hfp_model,
    hfp_run_records,
    rescaled_frequency_ensemble,
    rescaled_frequency_run,
)
from .limits import (
    CouplingParams,
    CouplingTable,
    WfParams,
    coupling_experiment,
    frozen_theta_model,
    lipschitz_constant,
    mckean_vlasov_model,
    meanfield_model,
    single_colony_model,
    wf_spatial_model,
)
from .analytics import (
    CdfTable,
    FixationVerdict,
    InvasionModel,
    InvasionResult,
    StationaryModel,
    c_theta_closed_form,
    colonization_rate,
    fixation_classify,
    gamma_identity_closed_form,
    gamma_identity_residual,
    invasion_criterion,
    invasion_integral_closed_form,
    sample_stationary,
    scale_density,
    scale_function,
    speed_density,
    stationary_moment,
)
from .diagnostics import (
    DeviationSeries,
    MonotoneVerdict,
    deviation_statistic,
    ks_distance,
    lyapunov_value,
    moment_monitor,
    monotone_moment_check,
)

__version__ = "0.1.0"

"""High-dimensional Bayesian optimization with dimension dropout."""

from ._backend import backend_name
from .acquisition import BetaSchedule, beta_d, ei_value, ucb_value
from .baselines import (
    addgp_step,
    full_bo_step,
    make_embedding,
    make_partition,
    random_search_step,
    rembo_step,
    run_addgp,
    run_full_bo,
    run_random_search,
    run_rembo,
)
from .direct import DirectConfig, DirectRect, DirectResult, maximize, potentially_optimal, trisect
from .dropout import (
    COPY_FILL,
    RANDOM_FILL,
    DropoutConfig,
    FillInStrategy,
    ObjectiveError,
    OptState,
    RunRecord,
    SubspaceSelection,
    augmented_sigma,
    fill_in,
    lipschitz_bound,
    mix_fill,
    project_history,
    propose_subspace_point,
    regret_curve,
    regret_diagnostics,
    run,
    select_dimensions,
    step,
)
from .harness import (
    ExperimentConfig,
    SummaryCurve,
    emit_csv,
    emit_plot_data,
    parse_config,
    run_experiment,
    summarize,
)
from .kernels_gp import (
    BoxDomain,
    GpPosterior,
    KernelParams,
    fit,
    gram_matrix,
    posterior_mean_var,
    se_kernel,
)
from .objectives import (
    DatasetTable,
    ObjectiveSpec,
    cascade_accuracy,
    gaussian_mixture,
    load_dataset,
    make_objective,
    make_separable_dataset,
    schwefel12,
)

__version__ = "0.1.0"

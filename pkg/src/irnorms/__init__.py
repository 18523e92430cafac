"""Estimation of H1, H2, and Hinf norms of SISO discrete-time systems from
identified impulse-response coefficients, plus the closed-loop simulation and
experiment harness used to evaluate the estimators."""

from .lti import (
    NormTriple,
    RootFindingError,
    TailBoundError,
    TransferFunction,
    closed_loop,
    freq_response,
    impulse_response,
    is_stable,
    polynomial_roots,
    simulate,
    true_norms,
)
from .signals import NoiseSpec, awgn_for_snr, prbs
from .loop import Dataset, read_dataset_csv, run_closed_loop, write_dataset_csv
from .identify import (
    FactorizationError,
    RankDeficiencyError,
    RegressionProblem,
    TCKernelParams,
    build_regression,
    estimate_noise_variance,
    ls_estimate,
    marginal_nll,
    regularized_estimate,
    tc_kernel,
    tune_hyperparameters,
)
from .norms import (
    PowerIterationError,
    ToeplitzSection,
    h1_from_ir,
    h2_from_ir,
    hinf_from_ir,
    norms_from_ir,
    signal_norm,
    toeplitz_matvec,
    toeplitz_rmatvec,
)
from .benchmarks import BENCHMARK_IDS, all_benchmark_loops, benchmark_loop
from .config import (
    ESTIMATOR_LS,
    ESTIMATOR_TC,
    ExperimentConfig,
    SnrGrid,
    derive_seed,
    load_config,
    parse_config_text,
    parse_snr_spec,
)
from .experiments import (
    MonteCarloOutcome,
    RunResult,
    SweepOutcome,
    estimate_from_csv,
    estimate_norms,
    identify_impulse_response,
    mean_percent_error,
    percent_error,
    run_monte_carlo,
    run_snr_sweep,
    run_table,
    write_results_csv,
    write_summary_csv,
)

__version__ = "0.1.0"

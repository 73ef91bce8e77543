"""Correlation estimation under communication constraints.

Two parties observe correlated samples (symmetric +-1 pairs or unit-variance
Gaussian pairs sharing a correlation rho) and may exchange at most k bits.
The package provides:

* exact information measures and closed-form risk benchmarks (``infotheory``),
* correlated-pair generation, the correlation-shift device, and the
  binary-to-Gaussian lift (``sources``),
* the estimation schemes themselves with exact transcripts plus fast
  sufficient-statistic samplers for Monte Carlo risk (``schemes``),
* a finite-alphabet verification lab for the contraction inequalities that
  drive the lower bounds (``contraction``),
* a command-line harness (``corrcomm``) for sweeps and verification suites.
"""

from .contraction import (
    ChainReport,
    InfoSplit,
    InteractiveSpec,
    SearchResult,
    SweepOutcome,
    binary_input_contraction,
    binary_symmetric_product,
    build_joint,
    compute_info_split,
    gap_hamming_demo,
    majority_channel,
    random_spec,
    replay_violation,
    search_max_ratio,
    sweep_binary_contraction,
    sweep_chain,
    sweep_gap_hamming,
    sweep_shift,
    sweep_tensorization,
    sweep_tilted,
    verify_interactive_chain,
    verify_shift_reduction,
    verify_tensorization,
    verify_tilted_contraction,
)
from .infotheory import (
    BoundSet,
    CosinePrior,
    FiniteJoint,
    ParamFamily,
    bayes_cr_bound,
    binary_entropy,
    binary_pair_family,
    cond_mutual_info,
    cosine_prior,
    entropy,
    fisher_fd,
    kl,
    mi_radius_gap,
    mutual_info,
    risk_bounds,
)
from .rng import check_seed, substream
from .schemes import (
    BlockLayout,
    EstimateResult,
    Message,
    RiskReport,
    SchemeConfig,
    Transcript,
    block_layout,
    check_preconditions,
    default_phase1_bits,
    estimate_risk,
    expected_max_normal,
    max_scheme_mse_exact,
    naive_mse_exact,
    run_binary_block,
    run_local_scheme,
    run_max_scheme,
    run_naive,
    run_two_way,
    var_max_normal,
)
from .sources import (
    CorrelationModel,
    PairBatch,
    ShiftParams,
    binary_to_gaussian,
    gen_pairs,
    shift_correlation,
    shift_params,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # information measures and benchmarks
    "FiniteJoint",
    "ParamFamily",
    "CosinePrior",
    "BoundSet",
    "binary_entropy",
    "entropy",
    "kl",
    "mutual_info",
    "cond_mutual_info",
    "mi_radius_gap",
    "binary_pair_family",
    "fisher_fd",
    "cosine_prior",
    "bayes_cr_bound",
    "risk_bounds",
    # sources and devices
    "CorrelationModel",
    "PairBatch",
    "ShiftParams",
    "gen_pairs",
    "shift_params",
    "shift_correlation",
    "binary_to_gaussian",
    # schemes and risk estimation
    "Message",
    "Transcript",
    "EstimateResult",
    "RiskReport",
    "SchemeConfig",
    "BlockLayout",
    "run_naive",
    "run_max_scheme",
    "run_local_scheme",
    "run_binary_block",
    "run_two_way",
    "block_layout",
    "default_phase1_bits",
    "check_preconditions",
    "estimate_risk",
    "expected_max_normal",
    "var_max_normal",
    "naive_mse_exact",
    "max_scheme_mse_exact",
    # contraction lab
    "InteractiveSpec",
    "InfoSplit",
    "ChainReport",
    "SearchResult",
    "SweepOutcome",
    "binary_symmetric_product",
    "build_joint",
    "compute_info_split",
    "random_spec",
    "search_max_ratio",
    "verify_tilted_contraction",
    "binary_input_contraction",
    "verify_tensorization",
    "verify_interactive_chain",
    "verify_shift_reduction",
    "gap_hamming_demo",
    "majority_channel",
    "replay_violation",
    "sweep_tilted",
    "sweep_binary_contraction",
    "sweep_chain",
    "sweep_tensorization",
    "sweep_shift",
    "sweep_gap_hamming",
    # reproducibility
    "check_seed",
    "substream",
]

"""Bounds, samplers, and experiments for community detection thresholds in
the stochastic block model."""

from .errors import (
    BudgetError,
    DomainError,
    NoCrossingError,
    ProjectionError,
    SamplingError,
    SBMBoundsError,
)
from .graphgen import (
    Graph,
    RandomStream,
    sample_er,
    sample_er_fixed_m,
    sample_planted,
    sample_sbm,
    sample_sbm_fixed_m,
)
from .params import (
    ModelParams,
    average_degree,
    connectivity_matrix,
    from_d_lambda,
    second_eigenvalue,
)
from .partition import (
    EdgeCounts,
    Partition,
    balance,
    count_with_overlap,
    edge_counts,
    exhaustive_detect,
    expected_counts,
    frobenius_sq,
    is_good,
    overlap,
    overlap_matrix,
    within_prob,
)
from .secondmoment import (
    PhiReport,
    an_entropy_bound,
    an_f,
    an_lemma_check,
    max_phi,
    one_d_bound,
    phi,
    quadratic_form,
    row_entropy,
    second_moment_estimate,
    second_moment_trials,
    sinkhorn,
)
from .thresholds import (
    ThresholdReport,
    bound_ratio_mu,
    coloring_dc_upper,
    dc_lower,
    dc_upper,
    effective_coloring_degree,
    kesten_stigum,
    lambda_star,
    min_overlap_beta,
    threshold_report,
)
from .experiments import DistinguishResult, run_distinguish, run_grid, run_table1

__all__ = [
    "BudgetError",
    "DomainError",
    "NoCrossingError",
    "ProjectionError",
    "SamplingError",
    "SBMBoundsError",
    "Graph",
    "RandomStream",
    "sample_er",
    "sample_er_fixed_m",
    "sample_planted",
    "sample_sbm",
    "sample_sbm_fixed_m",
    "ModelParams",
    "average_degree",
    "connectivity_matrix",
    "from_d_lambda",
    "second_eigenvalue",
    "EdgeCounts",
    "Partition",
    "balance",
    "count_with_overlap",
    "edge_counts",
    "exhaustive_detect",
    "expected_counts",
    "frobenius_sq",
    "is_good",
    "overlap",
    "overlap_matrix",
    "within_prob",
    "PhiReport",
    "an_entropy_bound",
    "an_f",
    "an_lemma_check",
    "max_phi",
    "one_d_bound",
    "phi",
    "quadratic_form",
    "row_entropy",
    "second_moment_estimate",
    "second_moment_trials",
    "sinkhorn",
    "ThresholdReport",
    "bound_ratio_mu",
    "coloring_dc_upper",
    "dc_lower",
    "dc_upper",
    "effective_coloring_degree",
    "kesten_stigum",
    "lambda_star",
    "min_overlap_beta",
    "threshold_report",
    "DistinguishResult",
    "run_distinguish",
    "run_grid",
    "run_table1",
]

"""Outdegree covariances of random plane recursive trees, exact and simulated."""

from .covariance import (
    CovMatrix,
    IdentityValue,
    asymptotic_diagonal_ratio,
    build_matrix,
    first_part_sum,
    inner_partial_fraction_sum,
    leading_minors,
    lemma1_sum,
    lemma2_sum,
    row_sum_partial,
    sigma_closed,
    sigma_double_sum,
)
from .exact import Rational, binomial, falling_factorial
from .identities import SweepConfig, VerificationReport, run_sweep, summarize
from .simulation import (
    SimConfig,
    SimReport,
    TreeState,
    compare_to_theory,
    exact_small_n,
    grow_tree,
    outdegree_census,
    run_replicates,
)

__version__ = "0.1.0"

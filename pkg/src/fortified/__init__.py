"""Fortified multi-optimum test functions and a DE replicate-run harness."""

__version__ = "0.1.0"

from .functions import (
    BoxDomain,
    BraninParams,
    KnownOptimum,
    ObjectiveFunction,
    branin_hoo,
    branin_registry,
    get_function,
)
from .fortification import BumpSpec, FortifiedFunction, OverlappingSupportError, bump_phi, fortify, slice_1d
from .de import DEConfig, RunRecord, de_minimize, latin_hypercube, quasi_newton_polish
from .harness import (
    Problem,
    ReplicateSummary,
    SuccessCriterion,
    binomial_std,
    bump_hit_probability,
    classify_run,
    required_runs,
    run_replicates,
    run_seed,
    sigma_fail,
)
from .multirun import MultiRunSummary, group_failures, independent_prediction, multirun_table

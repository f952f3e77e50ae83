"""Exact analysis of persuasion games with verifiable messages."""
from .commitment import (
    BudgetExceededError,
    CommitmentSolution,
    EquilibriumCommitmentVerdict,
    binary_cutoff_commitment,
    binary_ic_repair,
    build_co_lp,
    commitment_gap_bound_check,
    decide_commitment_in_equilibrium,
    find_deterministic_commitment,
    solve_commitment,
)
from .equilibrium import (
    AnalysisRefused,
    Equilibrium,
    construct_recommendation_equilibrium,
    enumerate_equilibrium_outcomes,
    verify_equilibrium,
)
from .game import (
    GameSpec,
    GameValidationError,
    Outcome,
    Partition,
    check_ic,
    check_obedience,
    check_outcome,
    full_revelation_outcome,
    validate_game,
)
from .interval import (
    IntervalOutcome,
    MeanThresholdGame,
    discretize_game,
    evaluate_interval_outcome,
    purify_interval_outcome,
)
from .numerics import LinearProgram, lp_solve
from .smm import construct_smm_equilibrium, smm_payoff, verify_smm_equilibrium

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CommitmentSolution",
    "EquilibriumCommitmentVerdict",
    "binary_cutoff_commitment",
    "binary_ic_repair",
    "build_co_lp",
    "commitment_gap_bound_check",
    "decide_commitment_in_equilibrium",
    "find_deterministic_commitment",
    "solve_commitment",
    "AnalysisRefused",
    "Equilibrium",
    "construct_recommendation_equilibrium",
    "enumerate_equilibrium_outcomes",
    "verify_equilibrium",
    "GameSpec",
    "GameValidationError",
    "Outcome",
    "Partition",
    "check_ic",
    "check_obedience",
    "check_outcome",
    "full_revelation_outcome",
    "validate_game",
    "IntervalOutcome",
    "MeanThresholdGame",
    "discretize_game",
    "evaluate_interval_outcome",
    "purify_interval_outcome",
    "LinearProgram",
    "lp_solve",
    "construct_smm_equilibrium",
    "smm_payoff",
    "verify_smm_equilibrium",
]

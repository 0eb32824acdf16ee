"""Tabular MDP policy optimisation toolkit."""

from ._core import (
    Error,
    Mdp,
    bandit,
    chain,
    evaluate,
    finite_k0,
    homotopic_pqa_step,
    pi_step,
    ppg_step,
    pqa_step,
    project_simplex,
    random_mdp,
    run,
    solve_optimal,
    suite_names,
    verify,
)

__all__ = [
    "Error",
    "Mdp",
    "bandit",
    "chain",
    "evaluate",
    "finite_k0",
    "homotopic_pqa_step",
    "pi_step",
    "ppg_step",
    "pqa_step",
    "project_simplex",
    "random_mdp",
    "run",
    "solve_optimal",
    "suite_names",
    "verify",
]

"""Growth models with uniform catastrophes: survivor law, extinction
probabilities, mean extinction times and seeded Monte Carlo checks."""
from .analytic import (
    ExtendedTime,
    OffspringLaw,
    critical_lambda,
    crossover_lambda,
    mean_tau_free,
    mean_tau_free_narayan,
    mean_tau_tree,
    narayan_mean_time,
    offspring_law_tree,
    psi_binomial,
    psi_free,
    psi_geometric,
    psi_tree_closed,
    psi_tree_general,
    table1,
    tau_parameters,
    tree_survival_condition,
)
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import BracketError, CatlabError, ConvergenceError, DomainError, InvariantError
from .special_functions import lerch_phi, surjection_count
from .survivor_law import SurvivorLaw, survivor_mean, survivor_pgf, survivor_pmf

__version__ = "0.1.0"

__all__ = [
    "BracketError", "CatlabError", "ConvergenceError", "DEFAULT_CONFIG", "DomainError",
    "ExtendedTime", "InvariantError", "OffspringLaw", "SolverConfig", "SurvivorLaw",
    "critical_lambda", "crossover_lambda", "lerch_phi", "mean_tau_free", "mean_tau_free_narayan",
    "mean_tau_tree", "narayan_mean_time", "offspring_law_tree", "psi_binomial", "psi_free",
    "psi_geometric", "psi_tree_closed", "psi_tree_general", "surjection_count", "survivor_mean",
    "survivor_pgf", "survivor_pmf", "table1", "tau_parameters", "tree_survival_condition",
]

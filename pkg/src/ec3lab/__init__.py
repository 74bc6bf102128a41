"""Random EC3 (positive 1-in-3 SAT) laboratory.

Generation and exact solving of random instances, a simulator for the
short-clause unit-propagation heuristic, the branching-process and
differential-equation analysis of that heuristic, and finite-size
satisfiability sweeps.
"""

from .branching import BranchPoint, BranchStats, Supercritical, expected_sets, lambda1, transition_matrix
from .formula import Formula, FormatError, evaluate, generate_random, parse, serialize, to_cnf, to_dimacs
from .harness import SweepConfig, SweepTable, crossing_estimate, sweep
from .ode import OdeConfig, Terminal, critical_r, integrate, max_lambda1
from .policy import RANDOM_3CLAUSE, RANDOM_VARIABLE, SHORT_CLAUSE, Kind, Policy
from .residual import NotForest, build_graph, is_forest, leaf_peel_satisfy
from .sc import AlgState, Contradiction, Outcome, RunResult, run
from .solver import BudgetExceeded, SolveResult, brute_force, solve

__version__ = "0.1.0"

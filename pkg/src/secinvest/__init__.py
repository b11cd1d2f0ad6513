"""Security-investment games on acyclic attack graphs.

Library surface: graph model and expected-loss evaluation, the Stackelberg
equilibrium solver with an exhaustive grid oracle, the series/parallel/input
reduction calculus with investment back-mapping, network design interventions
with their closed-form loss oracles, and JSON document I/O shared by the CLI
and the HTTP service.
"""

from .errors import (
    DegenerateDenominator,
    DegenerateKappa,
    DocumentError,
    GraphValidationError,
    InfeasibleBackmap,
    InvalidAnchor,
    NonConvergence,
    NotDecomposable,
    PathExplosion,
    RegimeViolation,
    SecinvestError,
    TooManyInvestableNodes,
    UnequalInputLosses,
    UnknownNode,
    Violation,
)
from .graphs import (
    AttackGraph,
    InvestmentProfile,
    NodeAttr,
    count_paths,
    enumerate_paths,
    path_loss,
    post_set,
    pre_set,
    validate,
    worst_case,
)
from .solver import EquilibriumResult, GameInstance, solve
from .oracle import grid_oracle
from .budget import is_sufficient, sufficient_budget
from .reduction import ReductionStep, ReductionTrace, backmap, reduce_graph, series_insufficient_allocate
from .interventions import InterventionReport, InterventionSpec, apply_intervention, evaluate_intervention, rank_interventions
from .formulas import closed_form_losses

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

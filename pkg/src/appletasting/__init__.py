"""Deterministic apple-tasting learners, adversaries, and mistake-bound tools."""

from ._backend import NUMBA_ENABLED, backend_name
from .game import (
    EXPERTS,
    INSTANCES,
    Certificate,
    GameDomainError,
    MistakeReport,
    ProtocolError,
    Round,
    Transcript,
    run_game,
    score,
    verify_certificate,
)
from .experts import (
    BudgetedExpertWeights,
    DoublingExpertWeights,
    GreedyEliminationExperts,
    ParameterError,
    RealizableExpertWeights,
    budgeted_expert_weights,
    diagnostics,
    doubling_expert_weights,
    realizable_expert_weights,
    run_oblivious,
)
from .classes import (
    BudgetedClass,
    FiniteClass,
    glue,
    is_k_realizable,
    load_class,
    parse_class,
    save_class,
    singleton_class,
    universal_class,
    write_class,
)
from .dimensions import (
    LEAF,
    SearchBudgetExceeded,
    TreeLeaf,
    TreeNode,
    d1_k,
    effective_width,
    is_shattered,
    littlestone_dim,
    littlestone_dim_via_trees,
    width1_spine_tree,
    width_depth,
)
from .minimax import OracleBudgetExceeded, minimax_value, minimax_value_plain, worst_case_mistakes
from .concepts import (
    DoublingNarrowLearner,
    DoublingReductionLearner,
    NarrowVersionSpaceLearner,
    ReductionLearner,
    build_cover,
    narrow_learner,
    reduction_learner,
    soa_predict,
)
from .adversaries import (
    AgnosticPhaseExpertsAdversary,
    FuzzClassAdversary,
    FuzzExpertsAdversary,
    PhaseExpertsAdversary,
    RandomClassSpec,
    VersionSpaceAdversary,
    Width1RepeatAdversary,
    sample_random_class,
    verify_random_class,
)

__version__ = "0.1.0"

from .simulator import (
    Agenda,
    SimulatedUser,
    UnsatisfiableOntology,
    UserGoal,
    compute_reward,
    sample_goal,
    simulate_turn,
)
from .env import DialogEnv
from .evaluate import (
    DialogOutcome,
    EvalConfig,
    EvalMetrics,
    metrics_csv,
    metrics_json,
    run_evaluation,
    run_single_dialog,
)

__all__ = [
    "Agenda",
    "DialogEnv",
    "DialogOutcome",
    "EvalConfig",
    "EvalMetrics",
    "SimulatedUser",
    "UnsatisfiableOntology",
    "UserGoal",
    "compute_reward",
    "metrics_csv",
    "metrics_json",
    "run_evaluation",
    "run_single_dialog",
    "sample_goal",
    "simulate_turn",
]

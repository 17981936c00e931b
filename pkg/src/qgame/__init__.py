"""Classical and EWL-quantized bimatrix games with evolutionary stability analysis."""

from .classical_games import (
    STANDARD_PD,
    BimatrixGame,
    PDParams,
    StrategyProfile,
    SymmetricGame,
    enumerate_pure_nash,
    expected_payoff,
    invasion_barrier,
    is_ess,
    is_nash,
    is_prisoners_dilemma,
    mixed_strategy,
    pure_strategy,
)
from .evolutionary import (
    INVASION_THRESHOLD,
    InvasionVerdict,
    PopulationState,
    ReplicatorTrajectory,
    classical_incumbent_invasion,
    contest_payoff_closed_form,
    invasion_barrier_numeric,
    population_payoff,
    quantum_incumbent_certificate,
    simulate_replicator,
)
from .ewl import (
    COOPERATE,
    DEFECT,
    QHAT,
    Certificate,
    EWLConfig,
    StrategyAngles,
    classical_reduction,
    entangler,
    final_state,
    is_pareto_optimal,
    is_quantum_nash,
    payoffs,
    strategy_unitary,
)
from .specfile import GameSpec, parse_game_spec

__version__ = "0.1.0"

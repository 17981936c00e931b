"""Evolutionary stability for classical and EWL-quantized contests.

Covers the closed-form contest payoffs of the maximally entangled Prisoner's
Dilemma with payoffs (3, 0, 5, 1), invasion of the classical ESS D by quantum
mutants, the stability of Q against quantum mutants, invasion barriers and
replicator dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .classical_games import (
    DEFAULT_TOL,
    STANDARD_PD,
    PDParams,
    SymmetricGame,
    _check_len,
    mixed_strategy,
)
from .ewl import DEFECT, QHAT, StrategyAngles, angle_grid

SELF_TOL = 1e-9
SHARE_TOL = 1e-9
#: phi above which a quantum mutant beats the incumbent D against D
INVASION_THRESHOLD = math.asin(1 / math.sqrt(5))


def canonical(a: StrategyAngles) -> StrategyAngles:
    """Collapse the theta = pi ray, where phi has no effect, onto D."""
    if a.theta == math.pi:
        return DEFECT
    return a


def same_strategy(a: StrategyAngles, b: StrategyAngles, tol: float = SELF_TOL) -> bool:
    a, b = canonical(a), canonical(b)
    return math.hypot(a.theta - b.theta, a.phi - b.phi) <= tol


# -- closed forms at gamma = pi/2, payoffs (3, 0, 5, 1) ---------------------

def _d_vs_u(a: StrategyAngles) -> float:
    c2, s2 = math.cos(a.theta / 2) ** 2, math.sin(a.theta / 2) ** 2
    return 5 * math.cos(a.phi) ** 2 * c2 + s2


def _u_vs_d(a: StrategyAngles) -> float:
    c2, s2 = math.cos(a.theta / 2) ** 2, math.sin(a.theta / 2) ** 2
    return 5 * math.sin(a.phi) ** 2 * c2 + s2


def _u_vs_u(a: StrategyAngles) -> float:
    c2, s2 = math.cos(a.theta / 2) ** 2, math.sin(a.theta / 2) ** 2
    sp, cp = math.sin(a.phi), math.cos(a.phi)
    return (
        3 * (math.cos(2 * a.phi) * c2) ** 2
        + 5 * c2 * s2 * (sp - cp) ** 2
        + (math.sin(2 * a.phi) * c2 + s2) ** 2
    )


def _u_vs_q(a: StrategyAngles) -> float:
    return (3 - 2 * math.cos(a.phi) ** 2) * math.cos(a.theta / 2) ** 2


def _q_vs_u(a: StrategyAngles) -> float:
    return _u_vs_q(a) + 5 * math.sin(a.theta / 2) ** 2


def contest_payoff_closed_form(
    focal: StrategyAngles,
    opponent: StrategyAngles,
    params: PDParams = STANDARD_PD,
) -> float:
    """Focal payoff in the maximally entangled contest, from the closed forms.

    Only pairings that involve D or Q, or a strategy against itself, have a
    closed form. Anything else, or other payoff values, should go through
    :func:`qgame.ewl.payoffs`.
    """
    if params != STANDARD_PD:
        raise ValueError(
            "closed forms exist only for payoffs (3, 0, 5, 1) at gamma = pi/2; "
            "use qgame.ewl.payoffs for other games"
        )
    f_is_d, o_is_d = same_strategy(focal, DEFECT, 0.0), same_strategy(opponent, DEFECT, 0.0)
    if f_is_d and o_is_d:
        return 1.0
    if f_is_d:
        return _d_vs_u(opponent)
    if o_is_d:
        return _u_vs_d(focal)
    f_is_q, o_is_q = focal == QHAT, opponent == QHAT
    if f_is_q and o_is_q:
        return 3.0
    if o_is_q:
        return _u_vs_q(focal)
    if f_is_q:
        return _q_vs_u(opponent)
    if canonical(focal) == canonical(opponent):
        return _u_vs_u(focal)
    raise ValueError(
        "no closed form for two distinct mutants; use qgame.ewl.payoffs instead"
    )


@dataclass(frozen=True)
class InvasionVerdict:
    """``margin`` is the incumbent's worst payoff advantage over a mutant in
    the deciding ESS condition; negative means some mutant wins."""

    incumbent_stable: bool
    margin: float
    witness: Optional[StrategyAngles] = None
    threshold: Optional[float] = None
    self_mutant: bool = False

    def __post_init__(self):
        if not self.incumbent_stable and self.witness is None:
            raise ValueError("an invaded verdict must name the invading mutant")

    @property
    def label(self) -> str:
        if self.self_mutant:
            return "self-mutant excluded"
        return "stable" if self.incumbent_stable else "invaded"


def classical_incumbent_invasion(mutant: StrategyAngles, tol: float = DEFAULT_TOL) -> InvasionVerdict:
    """Can a small group playing ``mutant`` invade a population fixed on D?"""
    if same_strategy(mutant, DEFECT):
        return InvasionVerdict(True, 0.0, None, INVASION_THRESHOLD, self_mutant=True)
    first = 1.0 - _u_vs_d(mutant)
    if first > tol:
        return InvasionVerdict(True, first, None, INVASION_THRESHOLD)
    if abs(first) <= tol:
        second = _d_vs_u(mutant) - _u_vs_u(mutant)
        if second > tol:
            return InvasionVerdict(True, second, None, INVASION_THRESHOLD)
        return InvasionVerdict(False, second, mutant, INVASION_THRESHOLD)
    return InvasionVerdict(False, first, mutant, INVASION_THRESHOLD)


def quantum_incumbent_certificate(
    grid: int = 64,
    tol: float = DEFAULT_TOL,
    mutants: Optional[Iterable[StrategyAngles]] = None,
) -> InvasionVerdict:
    """Check that no mutant on the grid (or in ``mutants``) does as well as Q
    does against Q. Mutants within ``tol`` of Q are skipped."""
    if mutants is None:
        theta, phi = angle_grid(grid)
        mutants = (StrategyAngles(t, p) for t, p in zip(theta, phi))

    worst, witness = math.inf, None
    for m in mutants:
        m = canonical(m)
        if math.hypot(m.theta - QHAT.theta, m.phi - QHAT.phi) <= tol:
            continue
        margin = 3.0 - _u_vs_q(m)
        if margin < worst:
            worst, witness = margin, m
    stable = worst > tol
    return InvasionVerdict(stable, worst, None if stable else witness, None)


# -- population games -------------------------------------------------------

def population_payoff(game: SymmetricGame, x, y, eps: float) -> float:
    """Payoff of ``x`` against the population mix (1 - eps) x + eps y."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps!r}")
    x = _check_len(mixed_strategy(x), game.size, "incumbent")
    y = _check_len(mixed_strategy(y), game.size, "mutant")
    return float(x @ game.matrix @ ((1 - eps) * x + eps * y))


def invasion_barrier_numeric(game: SymmetricGame, x, y, samples: int = 1000) -> float:
    """Barrier found by scanning eps and bisecting the first failing cell.

    Uses direct payoff evaluation only, so it serves as a check on
    :func:`qgame.classical_games.invasion_barrier`.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    x = _check_len(mixed_strategy(x), game.size, "incumbent")
    y = _check_len(mixed_strategy(y), game.size, "mutant")
    if np.array_equal(x, y):
        raise ValueError("invasion barrier needs a mutant distinct from the incumbent")

    def holds(eps: float) -> bool:
        mix = (1 - eps) * x + eps * y
        return x @ game.matrix @ mix > y @ game.matrix @ mix

    # failures narrower than one cell near eps = 0 would slip between scan points
    probes = [0.5**j / samples for j in range(1, 60)]
    failing = [e for e in probes if not holds(e)]
    if failing:
        hi = min(failing)
        if hi == probes[-1]:
            return 0.0
        lo = hi / 2
    else:
        for k in range(1, samples + 1):
            if not holds(k / samples):
                break
        else:
            return 1.0
        lo, hi = (k - 1) / samples, k / samples
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if holds(mid):
            lo = mid
        else:
            hi = mid
    return lo


class SimplexError(ValueError):
    pass


@dataclass(frozen=True)
class PopulationState:
    shares: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        w = np.array(self.shares, dtype=float)
        if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
            raise SimplexError("population shares must be a finite, non-empty vector")
        bad = np.nonzero(w < -SHARE_TOL)[0]
        if bad.size:
            raise SimplexError(f"negative share {w[bad[0]]:.6g} at index {bad[0]}")
        if abs(w.sum() - 1.0) > SHARE_TOL:
            raise SimplexError(f"shares sum to {w.sum():.12g}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "shares", w)
        object.__setattr__(self, "time", float(self.time))


@dataclass
class ReplicatorTrajectory:
    states: list[PopulationState]
    step_size: float
    game: SymmetricGame = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.states])

    @property
    def shares(self) -> np.ndarray:
        return np.vstack([s.shares for s in self.states])

    @property
    def final(self) -> PopulationState:
        return self.states[-1]


def replicator_rhs(game: SymmetricGame, x: np.ndarray) -> np.ndarray:
    """x_i [(M x)_i - x^T M x]."""
    fitness = game.matrix @ x
    return x * (fitness - x @ fitness)


def simulate_replicator(
    game: SymmetricGame,
    x0: PopulationState,
    step_size: float = 0.01,
    steps: int = 1000,
) -> ReplicatorTrajectory:
    """Integrate the replicator equation with classical RK4."""
    if not step_size > 0:
        raise ValueError(f"step size must be positive, got {step_size!r}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if x0.shares.size != game.size:
        raise ValueError(f"initial state has {x0.shares.size} shares, game has {game.size} strategies")

    h = float(step_size)
    x = np.array(x0.shares)
    states = [x0]
    for n in range(1, steps + 1):
        k1 = replicator_rhs(game, x)
        k2 = replicator_rhs(game, x + 0.5 * h * k1)
        k3 = replicator_rhs(game, x + 0.5 * h * k2)
        k4 = replicator_rhs(game, x + h * k3)
        x = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

        bad = np.nonzero(x < -SHARE_TOL)[0]
        if bad.size:
            raise SimplexError(
                f"step {n} drove share {bad[0]} to {x[bad[0]]:.6g}; reduce the step size"
            )
        drift = abs(x.sum() - 1.0)
        if drift > SHARE_TOL:
            raise SimplexError(f"step {n} drifted off the simplex by {drift:.3g}; reduce the step size")
        x = np.clip(x, 0.0, None)
        x /= x.sum()
        states.append(PopulationState(x.copy(), x0.time + n * h))
    return ReplicatorTrajectory(states, h, game)

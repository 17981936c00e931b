"""Classical two-player bimatrix games.

Payoff tables, mixed strategies, Nash checks, Prisoner's Dilemma
classification and Maynard Smith's evolutionary stability conditions for
symmetric pairwise contests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
SIMPLEX_TOL = 1e-12


class DimensionError(ValueError):
    """Strategy or profile does not fit the game's dimensions."""


def _finite_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D table, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def mixed_strategy(weights, tol: float = SIMPLEX_TOL) -> np.ndarray:
    """Validate a probability vector and return it as a read-only array."""
    w = np.array(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"mixed strategy must be a non-empty vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("mixed strategy contains non-finite weights")
    if np.any(w < -tol) or np.any(w > 1 + tol):
        raise ValueError(f"mixed strategy weights must lie in [0, 1]: {w.tolist()}")
    if abs(w.sum() - 1.0) > tol:
        raise ValueError(f"mixed strategy weights sum to {w.sum()!r}, expected 1")
    w.setflags(write=False)
    return w


def pure_strategy(index: int, size: int) -> np.ndarray:
    if not 0 <= index < size:
        raise DimensionError(f"pure strategy {index} out of range for {size} strategies")
    w = np.zeros(size)
    w[index] = 1.0
    w.setflags(write=False)
    return w


@dataclass(frozen=True)
class BimatrixGame:
    """m x n game; ``row_payoffs[i, j]`` and ``col_payoffs[i, j]`` are the
    payoffs when the row player picks i and the column player picks j."""

    row_payoffs: np.ndarray
    col_payoffs: np.ndarray
    row_labels: tuple[str, ...] = ()
    col_labels: tuple[str, ...] = ()

    def __post_init__(self):
        a = _finite_matrix(self.row_payoffs, "row payoffs")
        b = _finite_matrix(self.col_payoffs, "column payoffs")
        if a.shape != b.shape:
            raise DimensionError(f"payoff tables differ in shape: {a.shape} vs {b.shape}")
        object.__setattr__(self, "row_payoffs", a)
        object.__setattr__(self, "col_payoffs", b)
        m, n = a.shape
        rl = tuple(self.row_labels) or tuple(str(i) for i in range(m))
        cl = tuple(self.col_labels) or tuple(str(j) for j in range(n))
        if len(rl) != m or len(cl) != n:
            raise DimensionError(f"expected {m} row labels and {n} column labels")
        object.__setattr__(self, "row_labels", rl)
        object.__setattr__(self, "col_labels", cl)

    @classmethod
    def from_pairs(cls, table: Sequence[Sequence[tuple[float, float]]], **labels) -> BimatrixGame:
        arr = np.array(table, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 2:
            raise ValueError("expected an m x n table of (row, col) payoff pairs")
        return cls(arr[..., 0], arr[..., 1], **labels)

    @classmethod
    def symmetric(cls, game: SymmetricGame) -> BimatrixGame:
        """The bimatrix (M, M^T) induced by a symmetric game."""
        return cls(game.matrix, game.matrix.T, game.labels, game.labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.row_payoffs.shape

    def pair(self, i: int, j: int) -> tuple[float, float]:
        return float(self.row_payoffs[i, j]), float(self.col_payoffs[i, j])


@dataclass(frozen=True)
class SymmetricGame:
    """Symmetric pairwise contest: ``matrix[i, j]`` is the focal payoff of
    pure strategy i against j; the opponent's table is the transpose."""

    matrix: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        m = _finite_matrix(self.matrix, "payoff matrix")
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"symmetric game needs a square matrix, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        labels = tuple(self.labels) or tuple(str(i) for i in range(m.shape[0]))
        if len(labels) != m.shape[0]:
            raise DimensionError(f"expected {m.shape[0]} labels, got {len(labels)}")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def payoff(self, a, b) -> float:
        """P(a, b) = a^T M b."""
        a = _check_len(a, self.size, "focal strategy")
        b = _check_len(b, self.size, "opponent strategy")
        return float(a @ self.matrix @ b)


@dataclass(frozen=True)
class PDParams:
    """Symmetric 2x2 payoffs: reward r, sucker s, temptation t, punishment u."""

    r: float
    s: float
    t: float
    u: float

    def __post_init__(self):
        for name in ("r", "s", "t", "u"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"payoff {name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def is_dilemma(self) -> bool:
        return is_prisoners_dilemma(self)

    def values(self) -> tuple[float, float, float, float]:
        return self.r, self.s, self.t, self.u

    def symmetric_game(self) -> SymmetricGame:
        return SymmetricGame(np.array([[self.r, self.s], [self.t, self.u]]), ("C", "D"))

    def bimatrix(self) -> BimatrixGame:
        return BimatrixGame.symmetric(self.symmetric_game())


STANDARD_PD = PDParams(3, 0, 5, 1)


@dataclass(frozen=True)
class StrategyProfile:
    row: np.ndarray
    col: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row", mixed_strategy(self.row))
        object.__setattr__(self, "col", mixed_strategy(self.col))

    @classmethod
    def pure(cls, game: BimatrixGame, i: int, j: int) -> StrategyProfile:
        m, n = game.shape
        return cls(pure_strategy(i, m), pure_strategy(j, n))


def _check_len(w, n: int, what: str) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise DimensionError(f"{what} has {w.size} weights, game expects {n}")
    return w


def _check_profile(game: BimatrixGame, profile: StrategyProfile) -> tuple[np.ndarray, np.ndarray]:
    m, n = game.shape
    if profile.row.size != m or profile.col.size != n:
        raise DimensionError(
            f"profile is {profile.row.size}x{profile.col.size} but game is {m}x{n}"
        )
    return profile.row, profile.col


def expected_payoff(game: BimatrixGame, profile: StrategyProfile) -> tuple[float, float]:
    p, q = _check_profile(game, profile)
    return float(p @ game.row_payoffs @ q), float(p @ game.col_payoffs @ q)


def is_nash(game: BimatrixGame, profile: StrategyProfile, tol: float = DEFAULT_TOL) -> bool:
    """True when no pure unilateral deviation gains more than ``tol``.

    Checking pure deviations suffices: a mixed deviation's payoff is an
    average of pure ones against the same opponent mix.
    """
    p, q = _check_profile(game, profile)
    row_now, col_now = expected_payoff(game, profile)
    row_best = float(np.max(game.row_payoffs @ q))
    col_best = float(np.max(p @ game.col_payoffs))
    return row_best <= row_now + tol and col_best <= col_now + tol


def enumerate_pure_nash(game: BimatrixGame) -> set[tuple[int, int]]:
    a, b = game.row_payoffs, game.col_payoffs
    best_rows = a >= a.max(axis=0, keepdims=True)
    best_cols = b >= b.max(axis=1, keepdims=True)
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(best_rows & best_cols))}


def is_prisoners_dilemma(p: PDParams) -> bool:
    """Strict ordering s < u < r < t."""
    values = p.values()
    if not all(math.isfinite(v) for v in values):
        raise ValueError("payoffs must be finite")
    return p.s < p.u < p.r < p.t


def is_ess(
    game: SymmetricGame,
    x,
    challengers: Iterable,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Maynard Smith conditions of ``x`` against every challenger ``y``.

    Either P(x,x) > P(y,x), or the two tie and P(x,y) > P(y,y). Comparisons
    use ``tol`` as the strictness margin and the tie width.
    """
    x = _check_len(mixed_strategy(x), game.size, "incumbent")
    pxx = game.payoff(x, x)
    for y in challengers:
        y = _check_len(mixed_strategy(y), game.size, "challenger")
        if np.max(np.abs(x - y)) <= tol:
            raise ValueError("the incumbent itself appears among the challengers")
        pyx = game.payoff(y, x)
        if pxx > pyx + tol:
            continue
        if abs(pxx - pyx) <= tol and game.payoff(x, y) > game.payoff(y, y) + tol:
            continue
        return False
    return True


def _barrier_coefficients(game: SymmetricGame, x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    # P(x, mix) - P(y, mix) = a + b * eps with mix = (1 - eps) x + eps y
    a = game.payoff(x, x) - game.payoff(y, x)
    b = (game.payoff(x, y) - game.payoff(y, y)) - a
    return a, b


def invasion_barrier(game: SymmetricGame, x, y) -> float:
    """Largest eps0 in [0, 1] with P(x, m) > P(y, m) for every eps in (0, eps0),
    where m = (1 - eps) x + eps y. Exact, using that the gap is affine in eps."""
    x = _check_len(mixed_strategy(x), game.size, "incumbent")
    y = _check_len(mixed_strategy(y), game.size, "mutant")
    if np.array_equal(x, y):
        raise ValueError("invasion barrier needs a mutant distinct from the incumbent")
    a, b = _barrier_coefficients(game, x, y)
    if a < 0:
        return 0.0
    if a == 0:
        return 1.0 if b > 0 else 0.0
    if b >= 0:
        return 1.0
    return min(1.0, -a / b)

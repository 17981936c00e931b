"""Eisert-Wilkens-Lewenstein quantization of symmetric 2x2 games.

Two qubits, one per player, start in |S1 S1>. An entangling gate J(gamma) is
applied, each player acts locally with a unitary from the two-parameter family
U(theta, phi), J^dagger undoes the entanglement and the state is measured in
the computational basis. Basis order is |S1S1>, |S1S2>, |S2S1>, |S2S2>; the
row player owns the first tensor slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classical_games import DEFAULT_TOL, PDParams

UNITARY_TOL = 1e-10
NORM_TOL = 1e-10
DEFAULT_GRID = 64

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class StrategyAngles:
    """A point (theta, phi) with theta in [0, pi] and phi in [0, pi/2]."""

    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
        if not (math.isfinite(phi) and 0.0 <= phi <= HALF_PI):
            raise ValueError(f"phi must lie in [0, pi/2], got {phi!r}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    def __iter__(self):
        yield self.theta
        yield self.phi

    def unitary(self) -> np.ndarray:
        return strategy_unitary(self)


COOPERATE = StrategyAngles(0.0, 0.0)
DEFECT = StrategyAngles(math.pi, 0.0)
QHAT = StrategyAngles(0.0, HALF_PI)

NAMED_STRATEGIES = {"C": COOPERATE, "D": DEFECT, "Q": QHAT}


@dataclass(frozen=True)
class EWLConfig:
    params: PDParams
    gamma: float = HALF_PI

    def __post_init__(self):
        gamma = float(self.gamma)
        if not (math.isfinite(gamma) and 0.0 <= gamma <= HALF_PI):
            raise ValueError(f"gamma must lie in [0, pi/2], got {gamma!r}")
        object.__setattr__(self, "gamma", gamma)


def strategy_unitary(a: StrategyAngles) -> np.ndarray:
    c, s = math.cos(a.theta / 2), math.sin(a.theta / 2)
    e = complex(math.cos(a.phi), math.sin(a.phi))
    return np.array([[e * c, s], [-s, e.conjugate() * c]], dtype=complex)


def strategy_unitaries(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Stack of U(theta_k, phi_k), shape (k, 2, 2)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = e * c
    out[..., 0, 1] = s
    out[..., 1, 0] = -s
    out[..., 1, 1] = np.conj(e) * c
    return out


_FLIP = strategy_unitary(DEFECT)
_FLIP_FLIP = np.kron(_FLIP, _FLIP)


def entangler(gamma: float) -> np.ndarray:
    """J(gamma) = exp(i gamma D(x)D / 2) = cos(gamma/2) I + i sin(gamma/2) D(x)D.

    D is the flip U(pi, 0); the closed form holds because (D(x)D)^2 = I.
    """
    gamma = float(gamma)
    if not (math.isfinite(gamma) and 0.0 <= gamma <= HALF_PI):
        raise ValueError(f"gamma must lie in [0, pi/2], got {gamma!r}")
    return math.cos(gamma / 2) * np.eye(4, dtype=complex) + 1j * math.sin(gamma / 2) * _FLIP_FLIP


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), "fro"))


def _require_unitary(u, name: str) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got {u.shape}")
    err = unitarity_error(u)
    if err > UNITARY_TOL:
        raise ValueError(f"{name} is not unitary (|U^dagger U - I| = {err:.3g})")
    return u


def _as_unitary(u, name: str) -> np.ndarray:
    if isinstance(u, StrategyAngles):
        return strategy_unitary(u)
    return _require_unitary(u, name)


def final_state(cfg: EWLConfig, u_row, u_col) -> np.ndarray:
    """J^dagger (U_row (x) U_col) J |S1S1> as 4 complex amplitudes."""
    a = _as_unitary(u_row, "row unitary")
    b = _as_unitary(u_col, "column unitary")
    j = entangler(cfg.gamma)
    psi = j.conj().T @ np.kron(a, b) @ j[:, 0]
    norm = float(np.vdot(psi, psi).real)
    assert abs(norm - 1.0) <= NORM_TOL, f"final state lost normalization: {norm!r}"
    return psi


def _payoffs_from_probs(params: PDParams, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r, s, t, u = params.values()
    p11, p12, p21, p22 = (probs[..., k] for k in range(4))
    row = r * p11 + s * p12 + t * p21 + u * p22
    col = r * p11 + t * p12 + s * p21 + u * p22
    return row, col


def payoffs(cfg: EWLConfig, u_row, u_col) -> tuple[float, float]:
    """Expected (row, column) payoffs after measurement.

    ``u_row``/``u_col`` may be 2x2 unitaries or :class:`StrategyAngles`.
    """
    probs = np.abs(final_state(cfg, u_row, u_col)) ** 2
    row, col = _payoffs_from_probs(cfg.params, probs)
    return float(row), float(col)


def classical_reduction(a: StrategyAngles) -> float:
    """Probability of S1 that U(theta, phi) amounts to without entanglement."""
    return math.cos(a.theta / 2) ** 2


def angle_grid(resolution: int, phi_resolution: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Uniform (theta, phi) grid flattened in row-major order (theta outer)."""
    nt = int(resolution)
    nphi = nt if phi_resolution is None else int(phi_resolution)
    if nt < 2 or nphi < 2:
        raise ValueError("grid resolution must be at least 2 per axis")
    theta, phi = np.meshgrid(np.linspace(0.0, math.pi, nt), np.linspace(0.0, HALF_PI, nphi), indexing="ij")
    return theta.ravel(), phi.ravel()


def payoff_table(cfg: EWLConfig, row_unitaries: np.ndarray, col_unitaries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Payoffs for every (row, col) combination of two unitary stacks.

    Returns two arrays of shape (len(row_unitaries), len(col_unitaries)).
    """
    j = entangler(cfg.gamma)
    start = j[:, 0].reshape(2, 2)
    # (A (x) B) vec(V) = vec(A V B^T) for the row-major 2x2 reshape of a 4-vector
    left = (row_unitaries @ start)[:, None]
    right = col_unitaries[None]
    mid = np.empty((left.shape[0], right.shape[1], 4), dtype=complex)
    for p in range(2):
        for q in range(2):
            mid[..., 2 * p + q] = left[..., p, 0] * right[..., q, 0] + left[..., p, 1] * right[..., q, 1]
    psi = mid @ j.conj()  # row vector times J^dagger^T
    probs = psi.real ** 2 + psi.imag ** 2
    return _payoffs_from_probs(cfg.params, probs)


@dataclass(frozen=True)
class Certificate:
    """Outcome of a grid check.

    ``worst_margin`` is the largest gain found (deviation payoff minus
    equilibrium payoff for Nash; best improvement for Pareto). ``witness``
    names where it occurred.
    """

    holds: bool
    worst_margin: float
    witness: Optional[dict] = None


def is_quantum_nash(
    cfg: EWLConfig,
    pair: tuple[StrategyAngles, StrategyAngles],
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Certificate:
    row_eq, col_eq = pair
    eq_row, eq_col = payoffs(cfg, row_eq, col_eq)
    theta, phi = angle_grid(grid)
    dev = strategy_unitaries(theta, phi)

    row_dev, _ = payoff_table(cfg, dev, strategy_unitary(col_eq)[None])
    _, col_dev = payoff_table(cfg, strategy_unitary(row_eq)[None], dev)
    gains = {"row": row_dev[:, 0] - eq_row, "col": col_dev[0, :] - eq_col}
    payoff_of = {"row": row_dev[:, 0], "col": col_dev[0, :]}

    worst, witness = -math.inf, None
    for player in ("row", "col"):
        k = int(np.argmax(gains[player]))
        if gains[player][k] > worst:
            worst = float(gains[player][k])
            witness = {
                "player": player,
                "deviation": StrategyAngles(theta[k], phi[k]),
                "payoff": float(payoff_of[player][k]),
                "equilibrium_payoff": eq_row if player == "row" else eq_col,
            }
    return Certificate(worst <= tol, worst, witness)


def is_pareto_optimal(
    cfg: EWLConfig,
    pair: tuple[StrategyAngles, StrategyAngles],
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> Certificate:
    """Search all grid strategy pairs for one that Pareto-dominates ``pair``.

    A candidate dominates when neither player loses more than ``tol`` and one
    gains more than ``tol``. The witness is the dominating pair with the
    largest total gain (first in row-major order on ties).
    """
    ref_row, ref_col = payoffs(cfg, *pair)
    theta, phi = angle_grid(grid)
    us = strategy_unitaries(theta, phi)

    best_gain, best = -math.inf, None
    block = 64
    for lo in range(0, len(us), block):
        row, col = payoff_table(cfg, us[lo:lo + block], us)
        d_row, d_col = row - ref_row, col - ref_col
        dominates = (d_row >= -tol) & (d_col >= -tol) & (np.maximum(d_row, d_col) > tol)
        if not dominates.any():
            continue
        total = np.where(dominates, d_row + d_col, -np.inf)
        # first near-maximal entry, so round-off does not pick the witness
        k = np.unravel_index(int(np.argmax(total >= total.max() - tol)), total.shape)
        if total[k] > best_gain + tol:
            best_gain = float(total[k])
            i, j = lo + k[0], k[1]
            best = {
                "row_strategy": StrategyAngles(theta[i], phi[i]),
                "col_strategy": StrategyAngles(theta[j], phi[j]),
                "payoffs": (float(row[k]), float(col[k])),
                "reference": (ref_row, ref_col),
            }
    if best is None:
        return Certificate(True, 0.0, None)
    return Certificate(False, best_gain, best)

"""Line-oriented game description files.

Example::

    # Prisoner's Dilemma
    kind = pd
    r = 3
    s = 0
    t = 5
    u = 1
    gamma = pi/2

A general bimatrix game lists one ``row`` line per row strategy, each holding
space-separated ``row_payoff,col_payoff`` pairs::

    kind = bimatrix
    labels = C, D
    row = 3,3  0,5
    row = 5,0  1,1

Blank lines and ``#`` comments are ignored. ``labels`` names both players'
strategies; ``row_labels``/``col_labels`` name them separately.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .classical_games import BimatrixGame, PDParams, SymmetricGame, is_prisoners_dilemma
from .ewl import HALF_PI, EWLConfig

KINDS = ("bimatrix", "pd", "ewl")
_SCALAR_KEYS = {"r", "s", "t", "u", "gamma"}
_LABEL_KEYS = {"labels", "row_labels", "col_labels"}
_ALLOWED = {
    "bimatrix": {"row"} | _LABEL_KEYS,
    "pd": {"r", "s", "t", "u", "gamma"} | _LABEL_KEYS,
    "ewl": {"r", "s", "t", "u", "gamma"} | _LABEL_KEYS,
}
_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_PI_RE = re.compile(r"^(?:(?P<num>[-+]?[0-9.eE+-]+)\s*\*\s*)?pi(?:\s*/\s*(?P<den>[0-9.eE+-]+))?$")


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class SpecSemanticError(ValueError):
    pass


@dataclass(frozen=True)
class GameSpec:
    kind: str
    game: BimatrixGame
    params: Optional[PDParams] = None
    gamma: Optional[float] = None

    def symmetric_game(self) -> SymmetricGame:
        a, b = self.game.row_payoffs, self.game.col_payoffs
        if a.shape[0] != a.shape[1] or not np.array_equal(b, a.T):
            raise SpecSemanticError("game is not symmetric: column payoffs must be the transpose of row payoffs")
        return SymmetricGame(a, self.game.row_labels)

    def ewl_config(self) -> EWLConfig:
        if self.params is None:
            raise SpecSemanticError(f"kind '{self.kind}' has no quantum form; use kind 'pd' or 'ewl'")
        return EWLConfig(self.params, HALF_PI if self.gamma is None else self.gamma)


def parse_number(text: str) -> float:
    """A float, or a multiple/fraction of ``pi`` such as ``pi/2`` or ``0.3*pi``."""
    text = text.strip()
    m = _PI_RE.match(text)
    if m:
        value = math.pi
        if m.group("num"):
            value *= float(m.group("num"))
        if m.group("den"):
            value /= float(m.group("den"))
    else:
        value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite number {text!r}")
    return value


def _labels(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(","))


def parse_game_spec(text: str) -> GameSpec:
    entries: dict[str, tuple[str, int, int]] = {}
    rows: list[tuple[str, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise SpecSyntaxError("expected 'key = value'", lineno, col)
        key_part, value = line.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        value_col = len(key_part) + 2 + (len(value) - len(value.lstrip()))
        if not _KEY_RE.match(key):
            raise SpecSyntaxError(f"invalid key {key!r}", lineno, key_col)
        if not value.strip():
            raise SpecSyntaxError(f"missing value for {key!r}", lineno, value_col)
        if key == "row":
            rows.append((value, lineno, len(key_part) + 2))
            continue
        if key in entries:
            raise SpecSyntaxError(f"duplicate key {key!r}", lineno, key_col)
        entries[key] = (value.strip(), lineno, value_col)

    if "kind" not in entries:
        first = next((i for i, l in enumerate(text.splitlines(), 1) if l.split("#", 1)[0].strip()), 1)
        raise SpecSyntaxError("missing 'kind' header", first)
    kind, kind_line, kind_col = entries.pop("kind")
    if kind not in KINDS:
        raise SpecSyntaxError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}", kind_line, kind_col)

    allowed = _ALLOWED[kind]
    for key, (_, lineno, col) in entries.items():
        if key not in allowed:
            raise SpecSyntaxError(f"key {key!r} not allowed for kind {kind!r}", lineno, 1)
    if rows and "row" not in allowed:
        raise SpecSyntaxError(f"'row' lines not allowed for kind {kind!r}", rows[0][1], 1)

    numbers: dict[str, float] = {}
    for key in _SCALAR_KEYS & entries.keys():
        value, lineno, col = entries[key]
        try:
            numbers[key] = parse_number(value)
        except ValueError:
            raise SpecSyntaxError(f"{key!r} is not a number: {value!r}", lineno, col) from None

    labels = {}
    if "labels" in entries:
        labels["row_labels"] = labels["col_labels"] = _labels(entries["labels"][0])
    for key in ("row_labels", "col_labels"):
        if key in entries:
            labels[key] = _labels(entries[key][0])

    if kind == "bimatrix":
        return _bimatrix_spec(rows, labels)
    return _symmetric_spec(kind, numbers, labels)


def _bimatrix_spec(rows, labels) -> GameSpec:
    if not rows:
        raise SpecSemanticError("bimatrix game needs at least one 'row' line")
    table = []
    for value, lineno, base in rows:
        cells = []
        start = 0
        for token in value.split():
            idx = value.index(token, start)
            start = idx + len(token)
            pos = base + idx
            parts = token.split(",")
            if len(parts) != 2:
                raise SpecSyntaxError(f"expected 'row_payoff,col_payoff', got {token!r}", lineno, pos)
            try:
                cells.append((parse_number(parts[0]), parse_number(parts[1])))
            except ValueError:
                raise SpecSyntaxError(f"bad payoff pair {token!r}", lineno, pos) from None
        table.append(cells)
    widths = {len(r) for r in table}
    if len(widths) != 1:
        raise SpecSemanticError(f"rows have differing numbers of entries: {sorted(widths)}")
    try:
        game = BimatrixGame.from_pairs(table, **labels)
    except ValueError as exc:
        raise SpecSemanticError(str(exc)) from None
    return GameSpec("bimatrix", game)


def _symmetric_spec(kind, numbers, labels) -> GameSpec:
    missing = [k for k in ("r", "s", "t", "u") if k not in numbers]
    if missing:
        raise SpecSemanticError(f"kind {kind!r} requires payoffs {', '.join(missing)}")
    params = PDParams(numbers["r"], numbers["s"], numbers["t"], numbers["u"])
    if kind == "pd" and not is_prisoners_dilemma(params):
        raise SpecSemanticError(
            f"not a Prisoner's Dilemma: need s < u < r < t, got "
            f"r={params.r:g}, s={params.s:g}, t={params.t:g}, u={params.u:g}"
        )
    gamma = numbers.get("gamma")
    if gamma is not None and not 0.0 <= gamma <= HALF_PI:
        raise SpecSemanticError(f"gamma must lie in [0, pi/2], got {gamma!r}")
    base = params.bimatrix()
    if labels:
        base = BimatrixGame(base.row_payoffs, base.col_payoffs, labels.get("row_labels", ()), labels.get("col_labels", ()))
    return GameSpec(kind, base, params, gamma)

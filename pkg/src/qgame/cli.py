"""Command-line front end.

    qgame nash game.txt
    qgame sweep ewl.txt --opponent D --grid 32 --output sweep.csv
    qgame invade ewl.txt --incumbent D --mutant 0,pi/2
    qgame replicate pd.txt --x0 0.5,0.5 --dt 0.01 --steps 5000

Exit status is 0 on success, 1 for usage or parse errors and 2 when the input
parses but fails validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import classical_games as cg
from . import evolutionary as evo
from .ewl import (
    DEFECT,
    NAMED_STRATEGIES,
    QHAT,
    EWLConfig,
    StrategyAngles,
    angle_grid,
    is_pareto_optimal,
    is_quantum_nash,
    payoff_table,
    payoffs,
    strategy_unitary,
    strategy_unitaries,
)
from .specfile import GameSpec, SpecSemanticError, SpecSyntaxError, parse_game_spec, parse_number

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


def fmt(x: float) -> str:
    return f"{x:.12g}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- argument helpers --------------------------------------------------------

def parse_angles(text: str) -> StrategyAngles:
    """``C``, ``D``, ``Q`` or ``theta,phi`` (numbers may use ``pi``)."""
    key = text.strip()
    if key.upper() in NAMED_STRATEGIES:
        return NAMED_STRATEGIES[key.upper()]
    parts = key.split(",")
    if len(parts) != 2:
        raise UsageError(f"strategy must be C, D, Q or 'theta,phi', got {text!r}")
    try:
        theta, phi = (parse_number(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad angles {text!r}") from None
    return StrategyAngles(theta, phi)


def parse_mixed(text: str, labels: tuple[str, ...]) -> np.ndarray:
    """A strategy label (pure) or comma-separated weights."""
    key = text.strip()
    if key in labels:
        return cg.pure_strategy(labels.index(key), len(labels))
    try:
        weights = [parse_number(p) for p in key.split(",")]
    except ValueError:
        raise UsageError(f"unknown strategy {text!r}; labels are {', '.join(labels)}") from None
    if len(weights) != len(labels):
        raise cg.DimensionError(f"strategy {text!r} has {len(weights)} weights, game has {len(labels)} strategies")
    return cg.mixed_strategy(weights)


def angles_name(a: StrategyAngles) -> str:
    for name, ref in NAMED_STRATEGIES.items():
        if evo.same_strategy(a, ref, 0.0):
            return name
    return f"U({fmt(a.theta)},{fmt(a.phi)})"


def angles_json(a: StrategyAngles | None):
    return None if a is None else {"theta": a.theta, "phi": a.phi}


def _load(path: str) -> GameSpec:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_game_spec(text)


def _ewl_config(spec: GameSpec) -> EWLConfig:
    if spec.kind not in ("pd", "ewl"):
        raise SpecSemanticError(f"this command needs kind 'pd' or 'ewl', got {spec.kind!r}")
    return spec.ewl_config()


def _render(report: dict, args, text_lines: list[str]) -> str:
    if args.json:
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    return "\n".join(text_lines) + "\n"


def _csv_text(header: list[str], rows, args) -> str:
    if args.json:
        records = [dict(zip(header, (float(v) for v in row))) for row in rows]
        return json.dumps(records, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# -- commands ----------------------------------------------------------------

def cmd_nash(spec: GameSpec, args) -> str:
    game = spec.game
    profiles = sorted(cg.enumerate_pure_nash(game))
    names = [(game.row_labels[i], game.col_labels[j]) for i, j in profiles]
    report: dict = {"pure_nash": [list(n) for n in names]}
    lines = ["pure Nash equilibria: " + (", ".join(f"({a},{b})" for a, b in names) or "none")]

    if args.pair:
        cfg = _ewl_config(spec)
        pair = (parse_angles(args.pair[0]), parse_angles(args.pair[1]))
        cert = is_quantum_nash(cfg, pair, args.grid, args.tol)
        w = cert.witness
        report["quantum_nash"] = {
            "gamma": cfg.gamma,
            "pair": [angles_json(p) for p in pair],
            "holds": cert.holds,
            "worst_gain": cert.worst_margin,
            "witness": {**w, "deviation": angles_json(w["deviation"])} if w else None,
        }
        label = f"({angles_name(pair[0])},{angles_name(pair[1])})"
        verdict = "holds" if cert.holds else "fails"
        lines.append(f"quantum Nash {label} at gamma={fmt(cfg.gamma)} on {args.grid}x{args.grid} grid: {verdict}")
        lines.append(
            f"  best deviation: {w['player']} -> {angles_name(w['deviation'])} "
            f"payoff {fmt(w['payoff'])} vs {fmt(w['equilibrium_payoff'])} (gain {fmt(cert.worst_margin)})"
        )
        if args.pareto:
            par = is_pareto_optimal(cfg, pair, args.grid, args.tol)
            pw = par.witness
            report["pareto_optimal"] = {
                "holds": par.holds,
                "best_gain": par.worst_margin,
                "witness": None if pw is None else {
                    "row_strategy": angles_json(pw["row_strategy"]),
                    "col_strategy": angles_json(pw["col_strategy"]),
                    "payoffs": list(pw["payoffs"]),
                },
            }
            if par.holds:
                lines.append("Pareto optimal on grid: yes")
            else:
                lines.append(
                    f"Pareto optimal on grid: no, dominated by ({angles_name(pw['row_strategy'])},"
                    f"{angles_name(pw['col_strategy'])}) -> ({fmt(pw['payoffs'][0])},{fmt(pw['payoffs'][1])})"
                )
    return _render(report, args, lines)


def cmd_ess(spec: GameSpec, args) -> str:
    game = spec.symmetric_game()
    labels = game.labels
    x = parse_mixed(args.strategy, labels)
    if args.challenger:
        challengers = [parse_mixed(c, labels) for c in args.challenger]
    else:
        challengers = _default_challengers(game.size, args.grid, x, args.tol)
    stable = cg.is_ess(game, x, challengers, args.tol)
    barriers = [cg.invasion_barrier(game, x, y) for y in challengers]
    k = int(np.argmin(barriers)) if barriers else None
    report = {
        "strategy": x.tolist(),
        "challengers": len(challengers),
        "ess": stable,
        "min_barrier": barriers[k] if barriers else None,
        "weakest_challenger": challengers[k].tolist() if barriers else None,
    }
    lines = [f"ESS check of {args.strategy} against {len(challengers)} challengers: {'ESS' if stable else 'not ESS'}"]
    if barriers:
        lines.append(f"  smallest invasion barrier {fmt(barriers[k])} for challenger {_weights(challengers[k])}")
    return _render(report, args, lines)


def _weights(w) -> str:
    return "(" + ",".join(fmt(v) for v in w) + ")"


def _default_challengers(k: int, grid: int, x: np.ndarray, tol: float) -> list[np.ndarray]:
    """Evenly spaced points along every edge of the simplex, vertices included."""
    out = []
    ts = np.linspace(0.0, 1.0, max(grid, 2))
    for i in range(k):
        for j in range(i + 1, k):
            for t in ts:
                w = np.zeros(k)
                w[i], w[j] = 1 - t, t
                if np.max(np.abs(w - x)) > tol and not any(np.array_equal(w, o) for o in out):
                    out.append(w)
    return out


def cmd_payoff(spec: GameSpec, args) -> str:
    if spec.kind == "ewl" or args.quantum:
        cfg = _ewl_config(spec)
        a, b = parse_angles(args.row), parse_angles(args.col)
        p_row, p_col = payoffs(cfg, a, b)
        report = {"mode": "quantum", "gamma": cfg.gamma, "row": angles_json(a), "col": angles_json(b),
                  "p_row": p_row, "p_col": p_col}
        label = f"({angles_name(a)},{angles_name(b)}) at gamma={fmt(cfg.gamma)}"
    else:
        game = spec.game
        p = parse_mixed(args.row, game.row_labels)
        q = parse_mixed(args.col, game.col_labels)
        p_row, p_col = cg.expected_payoff(game, cg.StrategyProfile(p, q))
        report = {"mode": "classical", "row": p.tolist(), "col": q.tolist(), "p_row": p_row, "p_col": p_col}
        label = f"({args.row},{args.col})"
    return _render(report, args, [f"payoffs {label}: {fmt(p_row)}, {fmt(p_col)}"])


def sweep_rows(cfg: EWLConfig, opponent: StrategyAngles, theta_res: int, phi_res: int, gammas=None):
    """Rows of (theta, phi, p_row, p_col), or (gamma, theta, ...) when ``gammas``
    is given, in row-major order."""
    theta, phi = angle_grid(theta_res, phi_res)
    us = strategy_unitaries(theta, phi)
    opp = strategy_unitary(opponent)[None]
    rows = []
    for gamma in (gammas if gammas is not None else [cfg.gamma]):
        row, col = payoff_table(EWLConfig(cfg.params, gamma), us, opp)
        for k in range(len(theta)):
            values = (theta[k], phi[k], row[k, 0], col[k, 0])
            rows.append(((gamma,) + values) if gammas is not None else values)
    return rows


def cmd_sweep(spec: GameSpec, args) -> str:
    cfg = _ewl_config(spec)
    opponent = parse_angles(args.opponent)
    theta_res = args.theta_grid or args.grid
    phi_res = args.phi_grid or args.grid
    if theta_res < 2 or phi_res < 2:
        raise SpecSemanticError("sweep resolution must be at least 2 per axis")
    header = ["theta", "phi", "p_row", "p_col"]
    gammas = None
    if args.gamma_grid is not None:
        if args.gamma_grid < 2:
            raise SpecSemanticError("gamma resolution must be at least 2")
        gammas = np.linspace(0.0, math.pi / 2, args.gamma_grid)
        header = ["gamma"] + header
    return _csv_text(header, sweep_rows(cfg, opponent, theta_res, phi_res, gammas), args)


def _require_standard(cfg: EWLConfig):
    if cfg.params != cg.STANDARD_PD or cfg.gamma != math.pi / 2:
        raise SpecSemanticError(
            "invasion analysis is defined for payoffs r=3, s=0, t=5, u=1 at gamma=pi/2 only"
        )


def cmd_invade(spec: GameSpec, args) -> str:
    _require_standard(_ewl_config(spec))
    incumbent = parse_angles(args.incumbent)
    mutant = parse_angles(args.mutant) if args.mutant else None

    if evo.same_strategy(incumbent, DEFECT, 0.0):
        if mutant is not None:
            verdict = evo.classical_incumbent_invasion(mutant, args.tol)
        else:
            verdict = _sweep_d_incumbent(args.grid, args.tol)
    elif incumbent == QHAT:
        if mutant is not None and evo.same_strategy(mutant, QHAT, args.tol):
            verdict = evo.InvasionVerdict(True, 0.0, None, None, self_mutant=True)
        else:
            verdict = evo.quantum_incumbent_certificate(args.grid, args.tol, [mutant] if mutant else None)
    else:
        raise SpecSemanticError("incumbent must be D or Q")

    report = {
        "incumbent": angles_name(incumbent),
        "mutant": angles_json(mutant) if mutant else f"grid {args.grid}x{args.grid}",
        "verdict": verdict.label,
        "incumbent_stable": verdict.incumbent_stable,
        "margin": verdict.margin,
        "witness": angles_json(verdict.witness),
        "threshold": evo.INVASION_THRESHOLD,
    }
    target = angles_name(mutant) if mutant else f"{args.grid}x{args.grid} mutant grid"
    lines = [
        f"incumbent {angles_name(incumbent)} vs {target}: {verdict.label}",
        f"  margin: {fmt(verdict.margin)}",
        f"  threshold phi = arcsin(1/sqrt(5)) = {evo.INVASION_THRESHOLD:.9f} rad",
    ]
    if verdict.witness is not None:
        lines.append(f"  invading mutant: {angles_name(verdict.witness)}")
    return _render(report, args, lines)


def _sweep_d_incumbent(grid: int, tol: float) -> evo.InvasionVerdict:
    theta, phi = angle_grid(grid)
    worst = None
    for t, p in zip(theta, phi):
        v = evo.classical_incumbent_invasion(StrategyAngles(t, p), tol)
        if v.self_mutant:
            continue
        if worst is None or v.margin < worst.margin:
            worst = v
    return worst


def cmd_replicate(spec: GameSpec, args) -> str:
    game = spec.symmetric_game()
    try:
        shares = [parse_number(p) for p in args.x0.split(",")]
    except ValueError:
        raise UsageError(f"bad initial shares {args.x0!r}") from None
    if len(shares) != game.size:
        raise evo.SimplexError(f"--x0 has {len(shares)} shares, game has {game.size} strategies")
    traj = evo.simulate_replicator(game, evo.PopulationState(shares), args.dt, args.steps)
    header = ["time"] + [f"share_{i}" for i in range(game.size)]
    rows = [(s.time, *s.shares) for s in traj.states]
    final = traj.final
    summary = ", ".join(f"{lab}={fmt(v)}" for lab, v in zip(game.labels, final.shares))
    print(f"final state at t={fmt(final.time)}: {summary}", file=sys.stderr)
    return _csv_text(header, rows, args)


COMMANDS = {
    "nash": cmd_nash,
    "ess": cmd_ess,
    "payoff": cmd_payoff,
    "sweep": cmd_sweep,
    "invade": cmd_invade,
    "replicate": cmd_replicate,
}


def build_parser() -> argparse.ArgumentParser:
    def add_globals(p, defaults: bool):
        d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
        p.add_argument("--tol", type=float, default=d(cg.DEFAULT_TOL), help="comparison tolerance")
        p.add_argument("--grid", type=int, default=d(64), help="grid resolution per axis")
        p.add_argument("--output", "-o", default=d("-"), help="output path, '-' for stdout")
        p.add_argument("--json", action="store_true", default=d(False), help="emit JSON instead of text/CSV")

    parser = _Parser(prog="qgame", description="Classical and quantum (EWL) game analysis.")
    add_globals(parser, True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="game description file, '-' for stdin")
        add_globals(p, False)
        return p

    p = command("nash", "pure Nash equilibria; quantum Nash check with --pair")
    p.add_argument("--pair", nargs=2, metavar=("ROW", "COL"), help="quantum strategies to certify")
    p.add_argument("--pareto", action="store_true", help="also certify Pareto optimality of --pair")

    p = command("ess", "evolutionary stability in the symmetric game")
    p.add_argument("--strategy", required=True, help="label or weights of the incumbent")
    p.add_argument("--challenger", action="append", help="label or weights; repeatable")

    p = command("payoff", "expected payoffs of a strategy pair")
    p.add_argument("--row", required=True)
    p.add_argument("--col", required=True)
    p.add_argument("--quantum", action="store_true", help="treat a pd game as its EWL quantization")

    p = command("sweep", "quantum payoffs over a (theta, phi) grid against a fixed opponent")
    p.add_argument("--opponent", required=True, help="C, D, Q or theta,phi")
    p.add_argument("--theta-grid", type=int)
    p.add_argument("--phi-grid", type=int)
    p.add_argument("--gamma-grid", type=int, help="also sweep gamma over [0, pi/2]")

    p = command("invade", "can a quantum mutant invade D or Q")
    p.add_argument("--incumbent", required=True, choices=["D", "Q"])
    p.add_argument("--mutant", help="C, D, Q or theta,phi; a grid sweep when omitted")

    p = command("replicate", "integrate replicator dynamics")
    p.add_argument("--x0", required=True, help="initial shares, comma separated")
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=1000)
    return parser


def _write(text: str, target: str):
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _load(args.spec)
        out = COMMANDS[args.command](spec, args)
        _write(out, args.output)
    except (UsageError, SpecSyntaxError) as exc:
        print(f"qgame: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"qgame: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

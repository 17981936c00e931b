import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qgame import STANDARD_PD, EWLConfig, StrategyAngles, StrategyProfile, expected_payoff, simulate_replicator
from qgame.cli import main, sweep_rows
from qgame.evolutionary import PopulationState

PD = "kind = pd\nr = 3\ns = 0\nt = 5\nu = 1\n"
PD_CLASSICAL = PD + "gamma = 0\n"
COORD = "kind = bimatrix\nlabels = A, B\nrow = 1,1 0,0\nrow = 0,0 1,1\n"
FLAT = "kind = bimatrix\nrow = 2,2 2,2\nrow = 2,2 2,2\n"


@pytest.fixture
def spec_file(tmp_path):
    def write(text, name="game.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


class TestNash:
    def test_pd(self, capsys, spec_file):
        code, out, _ = run(capsys, "nash", spec_file(PD))
        assert code == 0
        assert out.strip() == "pure Nash equilibria: (D,D)"

    def test_flat_game_lists_everything(self, capsys, spec_file):
        code, out, _ = run(capsys, "--json", "nash", spec_file(FLAT))
        assert json.loads(out)["pure_nash"] == [["0", "0"], ["0", "1"], ["1", "0"], ["1", "1"]]

    def test_coordination(self, capsys, spec_file):
        _, out, _ = run(capsys, "nash", spec_file(COORD))
        assert "(A,A), (B,B)" in out

    def test_quantum_pair(self, capsys, spec_file):
        code, out, _ = run(capsys, "nash", spec_file(PD), "--pair", "Q", "Q", "--grid", "20", "--pareto")
        assert code == 0
        assert "quantum Nash (Q,Q) at gamma=1.57079632679 on 20x20 grid: holds" in out
        assert "Pareto optimal on grid: yes" in out

    def test_quantum_defection_fails(self, capsys, spec_file):
        code, out, _ = run(capsys, "--json", "nash", spec_file(PD), "--pair", "D", "D", "--grid", "20")
        report = json.loads(out)["quantum_nash"]
        assert not report["holds"]
        assert report["witness"]["payoff"] == pytest.approx(5)
        assert report["witness"]["deviation"] == {"theta": 0.0, "phi": math.pi / 2}

    def test_classical_pareto_witness(self, capsys, spec_file):
        _, out, _ = run(capsys, "nash", spec_file(PD_CLASSICAL), "--pair", "D", "D", "--grid", "8", "--pareto")
        assert "dominated by (C,C) -> (3,3)" in out

    def test_pair_needs_quantum_kind(self, capsys, spec_file):
        code, _, err = run(capsys, "nash", spec_file(COORD), "--pair", "Q", "Q")
        assert code == 2
        assert "kind 'pd' or 'ewl'" in err


class TestEssAndPayoff:
    def test_defection_is_ess(self, capsys, spec_file):
        code, out, _ = run(capsys, "--json", "ess", spec_file(PD), "--strategy", "D", "--challenger", "C")
        report = json.loads(out)
        assert code == 0 and report["ess"] is True
        assert report["min_barrier"] == 1.0

    def test_default_challengers(self, capsys, spec_file):
        _, out, _ = run(capsys, "ess", spec_file(PD), "--strategy", "C", "--grid", "11")
        assert "against 10 challengers: not ESS" in out

    def test_classical_uniform(self, capsys, spec_file):
        _, out, _ = run(capsys, "payoff", spec_file(PD), "--row", "0.5,0.5", "--col", "0.5,0.5")
        assert out.strip() == "payoffs (0.5,0.5,0.5,0.5): 2.25, 2.25"

    def test_quantum(self, capsys, spec_file):
        _, out, _ = run(capsys, "--json", "payoff", spec_file(PD), "--quantum", "--row", "Q", "--col", "Q")
        report = json.loads(out)
        assert (report["p_row"], report["p_col"]) == pytest.approx((3, 3), abs=1e-9)

    def test_weights_wrong_length(self, capsys, spec_file):
        code, _, err = run(capsys, "payoff", spec_file(PD), "--row", "0.2,0.3,0.5", "--col", "C")
        assert code == 2 and "3 weights" in err


class TestSweep:
    def test_corners_against_defection(self, capsys, spec_file):
        code, out, _ = run(capsys, "sweep", spec_file(PD), "--opponent", "D", "--grid", "2")
        header, data = read_csv(out)
        assert code == 0
        assert header == ["theta", "phi", "p_row", "p_col"]
        assert data.shape == (4, 4)
        # row-major: theta outer, phi inner
        np.testing.assert_allclose(data[:, :2], [[0, 0], [0, math.pi / 2], [math.pi, 0], [math.pi, math.pi / 2]], atol=1e-11)
        assert data[1, 2] == 5

    def test_resolution_one_rejected(self, capsys, spec_file):
        code, _, err = run(capsys, "sweep", spec_file(PD), "--opponent", "D", "--grid", "1")
        assert code == 2 and "at least 2" in err

    def test_classical_limit(self, capsys, spec_file, pd_bimatrix):
        _, out, _ = run(capsys, "sweep", spec_file(PD_CLASSICAL), "--opponent", "1.0,0.4", "--grid", "6")
        _, data = read_csv(out)
        y = math.cos(0.5) ** 2
        for theta, _, p_row, p_col in data:
            x = math.cos(theta / 2) ** 2
            ref = expected_payoff(pd_bimatrix, StrategyProfile([x, 1 - x], [y, 1 - y]))
            assert (p_row, p_col) == pytest.approx(ref, abs=1e-10)

    def test_round_trip(self, capsys, spec_file):
        _, out, _ = run(capsys, "sweep", spec_file(PD), "--opponent", "0.7,0.2", "--theta-grid", "9", "--phi-grid", "5")
        _, data = read_csv(out)
        expected = np.array(sweep_rows(EWLConfig(STANDARD_PD), StrategyAngles(0.7, 0.2), 9, 5))
        assert data.shape == (45, 4)
        assert np.max(np.abs(data - expected)) <= 1e-10

    def test_gamma_column(self, capsys, spec_file):
        _, out, _ = run(capsys, "sweep", spec_file(PD), "--opponent", "Q", "--grid", "3", "--gamma-grid", "2")
        header, data = read_csv(out)
        assert header == ["gamma", "theta", "phi", "p_row", "p_col"]
        assert data.shape == (18, 5)
        np.testing.assert_allclose(data[:, 0], [0.0] * 9 + [math.pi / 2] * 9, atol=1e-11)

    def test_deterministic_bytes(self, capsys, spec_file, tmp_path):
        path = spec_file(PD)
        outs = []
        for k in range(2):
            target = tmp_path / f"out{k}.csv"
            assert main(["sweep", path, "--opponent", "D", "--grid", "7", "--output", str(target)]) == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1] and outs[0].startswith(b"theta,phi,p_row,p_col\n")

    def test_json_mirror(self, capsys, spec_file):
        _, out, _ = run(capsys, "--json", "sweep", spec_file(PD), "--opponent", "D", "--grid", "2")
        records = json.loads(out)
        assert records[1]["p_row"] == pytest.approx(5)


class TestInvade:
    def test_qhat_invades_defection(self, capsys, spec_file):
        code, out, _ = run(capsys, "invade", spec_file(PD), "--incumbent", "D", "--mutant", "Q")
        assert code == 0
        assert "incumbent D vs Q: invaded" in out
        assert "0.463647609 rad" in out

    def test_qhat_holds_on_grid(self, capsys, spec_file):
        _, out, _ = run(capsys, "--json", "invade", spec_file(PD), "--incumbent", "Q", "--grid", "64")
        report = json.loads(out)
        assert report["verdict"] == "stable" and report["margin"] > 0

    def test_self_mutant(self, capsys, spec_file):
        _, out, _ = run(capsys, "invade", spec_file(PD), "--incumbent", "D", "--mutant", "D")
        assert "self-mutant excluded" in out

    def test_defection_grid_invaded(self, capsys, spec_file):
        _, out, _ = run(capsys, "--json", "invade", spec_file(PD), "--incumbent", "D", "--grid", "16")
        report = json.loads(out)
        assert report["verdict"] == "invaded"
        assert report["witness"] == {"theta": 0.0, "phi": math.pi / 2}

    def test_other_params_rejected(self, capsys, spec_file):
        code, _, err = run(capsys, "invade", spec_file(PD.replace("r = 3", "r = 4")), "--incumbent", "D", "--mutant", "Q")
        assert code == 2 and "r=3, s=0, t=5, u=1" in err


class TestReplicate:
    def test_pd_fixation(self, capsys, spec_file):
        code, out, err = run(capsys, "replicate", spec_file(PD), "--x0", "0.5,0.5", "--dt", "0.01", "--steps", "5000")
        header, data = read_csv(out)
        assert code == 0
        assert header == ["time", "share_0", "share_1"]
        assert data.shape == (5001, 3)
        assert data[-1, 2] > 0.999
        assert err.startswith("final state at t=50:")
        traj = simulate_replicator(STANDARD_PD.symmetric_game(), PopulationState([0.5, 0.5]), 0.01, 5000)
        assert np.max(np.abs(data[:, 1:] - traj.shares)) <= 1e-10
        assert np.max(np.abs(data[:, 0] - traj.times)) <= 1e-10

    def test_vertex_constant(self, capsys, spec_file):
        _, out, _ = run(capsys, "replicate", spec_file(PD), "--x0", "1,0", "--steps", "10")
        _, data = read_csv(out)
        assert np.array_equal(data[:, 1:], np.tile([1.0, 0.0], (11, 1)))

    def test_flat_game_constant(self, capsys, spec_file):
        _, out, _ = run(capsys, "replicate", spec_file(FLAT), "--x0", "0.3,0.7", "--steps", "10")
        _, data = read_csv(out)
        np.testing.assert_allclose(data[:, 1:], np.tile([0.3, 0.7], (11, 1)), atol=1e-12)

    def test_bad_simplex(self, capsys, spec_file):
        code, _, err = run(capsys, "replicate", spec_file(PD), "--x0", "0.5,0.6")
        assert code == 2 and "sum" in err


class TestExitCodes:
    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate", "x"])
        assert exc.value.code == 1

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "nash", str(tmp_path / "nope.txt"))
        assert code == 1 and "cannot read" in err

    def test_parse_error(self, capsys, spec_file):
        code, _, err = run(capsys, "nash", spec_file(""))
        assert code == 1 and "line 1" in err

    def test_semantic_error(self, capsys, spec_file):
        code, _, err = run(capsys, "nash", spec_file(PD.replace("t = 5", "t = 2")))
        assert code == 2 and "not a Prisoner's Dilemma" in err

    def test_module_entry_point(self, spec_file):
        proc = subprocess.run(
            [sys.executable, "-m", "qgame", "nash", spec_file(PD)], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0
        assert "(D,D)" in proc.stdout

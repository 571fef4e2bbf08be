"""Tests for the dskp-lab command line."""

import json

from typer.testing import CliRunner

from dskplab.cli import app

runner = CliRunner()


class TestCommands:
    """Tests for successful command runs."""

    def test_evolve_linear_solution(self):
        """Test evolving a linear solution."""
        result = runner.invoke(
            app, ["evolve", "--solution", "linear:1,9,5,0", "--level", "2", "--at", "0,0,2"]
        )
        assert result.exit_code == 0, result.output
        assert "Evolution completed" in result.output

    def test_evolve_weights_file(self, tmp_path):
        """Test round-tripping initial data through --output and --weights."""
        first = tmp_path / "first.json"
        result = runner.invoke(app, ["evolve", "--level", "1", "--seed", "4", "-o", str(first)])
        assert result.exit_code == 0, result.output
        weights = tmp_path / "initial.json"
        weights.write_text(json.dumps(json.loads(first.read_text())["initial"]))
        result = runner.invoke(app, ["evolve", "--level", "1", "--weights", str(weights)])
        assert result.exit_code == 0, result.output

    def test_symbolic_z(self, tmp_path):
        """Test the symbolic partition function of A_1."""
        output = tmp_path / "z.json"
        result = runner.invoke(
            app, ["z", "--graph", "aztec:1", "--mode", "symbolic", "-o", str(output)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(output.read_text())["monomials"] == 6

    def test_symbolic_z_default_file(self, tmp_path, monkeypatch):
        """Test that z writes z_<graph>.json by default, with 220 monomials on A_2."""
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(app, ["z", "--graph", "aztec:2", "--mode", "symbolic"])
        assert result.exit_code == 0, result.output
        assert json.loads((tmp_path / "z_aztec_2.json").read_text())["monomials"] == 220

    def test_z_out_json(self, tmp_path, monkeypatch):
        """Test --out json for the partition function."""
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(
            app, ["z", "--graph", "aztec:1", "--mode", "symbolic", "--out", "json"]
        )
        assert result.exit_code == 0, result.output
        assert json.loads((tmp_path / "z_aztec_1.json").read_text())["monomials"] == 6

    def test_devron_out_file(self, tmp_path, monkeypatch):
        """Test a Dodgson report written through --out report.json."""
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(
            app, ["devron", "--kind", "dodgson", "--m", "3", "--seed", "7", "--out", "report.json"]
        )
        assert result.exit_code == 0, result.output
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["predicted_level"] == 3
        assert report["closed_form_matches"] is True
        assert len(report["final_values"]) == 1

    def test_y(self):
        """Test a numeric ratio function."""
        result = runner.invoke(app, ["y", "--graph", "aztec:2", "--seed", "3"])
        assert result.exit_code == 0, result.output
        assert "Ratio function computed" in result.output

    def test_graph_with_raise(self, tmp_path):
        """Test the spider-move comparison on A_3."""
        output = tmp_path / "graph.json"
        result = runner.invoke(
            app, ["graph", "--graph", "aztec:3", "--raise", "0,0", "-o", str(output)]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(output.read_text())["raise"]["isomorphic"] is True

    def test_forests(self, tmp_path):
        """Test the tree/forest listing of A_1."""
        output = tmp_path / "forests.json"
        result = runner.invoke(app, ["forests", "--k", "1", "--limit", "2", "-o", str(output)])
        assert result.exit_code == 0, result.output
        payload = json.loads(output.read_text())
        assert payload["count"] == 6
        assert payload["listed"] == 2

    def test_chi_counts(self, tmp_path):
        """Test chi4 monomial counts on A_1."""
        output = tmp_path / "chi.json"
        result = runner.invoke(
            app, ["chi", "--variant", "chi4", "--k", "1", "--counts", "-o", str(output)]
        )
        assert result.exit_code == 0, result.output
        counts = json.loads(output.read_text())["counts"]
        assert (counts["numerator"], counts["denominator"]) == (4, 2)

    def test_limitshape_csv(self, tmp_path):
        """Test a small scan written as CSV."""
        output = tmp_path / "scan.csv"
        result = runner.invoke(
            app,
            ["limitshape", "--linear", "1,9,5", "--k", "10", "--grid", "5x5", "-o", str(output)],
        )
        assert result.exit_code == 0, result.output
        lines = output.read_text().splitlines()
        assert lines[0] == "x,y,rho,k_rho,log_rate"
        assert len(lines) == 26

    def test_verify_quick(self, tmp_path):
        """Test one quick check with its summary file."""
        output = tmp_path / "summary.json"
        result = runner.invoke(
            app, ["verify", "--suite", "quick", "--only", "one_step_formula", "-o", str(output)]
        )
        assert result.exit_code == 0, result.output
        summary = json.loads(output.read_text())
        assert summary["checks_run"] == 1
        assert summary["checks_passed"] == 1


class TestCommandErrors:
    """Tests for error reporting."""

    def test_unknown_mode(self):
        """Test that an unknown mode exits with status 1."""
        result = runner.invoke(app, ["z", "--mode", "float"])
        assert result.exit_code == 1
        assert "Unknown mode" in result.output

    def test_unknown_out(self):
        """Test that --out accepts only json or a .json file name."""
        result = runner.invoke(app, ["devron", "--out", "report.txt"])
        assert result.exit_code == 1
        assert "Unknown output" in result.output

    def test_unknown_heights(self):
        """Test that an unknown height function is reported."""
        result = runner.invoke(app, ["evolve", "--heights", "hexagon"])
        assert result.exit_code == 1
        assert "Unknown height function" in result.output

    def test_conflicting_q(self):
        """Test that q must be given exactly once."""
        result = runner.invoke(app, ["limitshape", "--q", "1/2", "--linear", "1,9,5"])
        assert result.exit_code == 1
        assert "exactly one" in result.output

    def test_unknown_check(self, tmp_path):
        """Test that verify rejects unknown check names."""
        result = runner.invoke(
            app, ["verify", "--only", "nope", "-o", str(tmp_path / "summary.json")]
        )
        assert result.exit_code == 1
        assert "Unknown checks" in result.output

    def test_missing_weights_file(self, tmp_path):
        """Test that --weights must name an existing file."""
        result = runner.invoke(app, ["y", "--weights", str(tmp_path / "missing.json")])
        assert result.exit_code == 2

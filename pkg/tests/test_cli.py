"""
Tests for the CLI module.
"""

import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from freeregress.cli import CommandType, OutputFormat, RunConfig, main
from freeregress.cli.output import build_table, render_csv, render_json
from freeregress.config import DEFAULT_SEED, SEED_ENV_VAR, VERIFY_CONFIG
from freeregress.errors import QuadratureMismatch


@pytest.fixture
def runner():
    """A click test runner."""
    return CliRunner()


def invoke(runner, args, **kwargs):
    return runner.invoke(main, args, catch_exceptions=False, **kwargs)


def test_run_config_validation():
    """Test that a run is validated before anything is computed."""
    run = RunConfig(command="verify", target="thm1", parameters={"sigma": 1})
    assert run.name == "verify thm1"
    assert run.output_format == OutputFormat.JSON
    assert str(run) == "verify thm1 (json) with parameters: sigma=1"
    assert RunConfig(command=CommandType.DENSITY, output_format="csv").output_format == OutputFormat.CSV

    with pytest.raises(ValueError, match="CSV output is only available"):
        RunConfig(command=CommandType.MOMENTS, output_format="csv")
    with pytest.raises(ValueError, match="Order must be at least 1"):
        RunConfig(command=CommandType.MOMENTS, order=0)
    with pytest.raises(ValueError, match="Dimension must be at least"):
        RunConfig(command=CommandType.SIMULATE, dimension=8)
    with pytest.raises(ValueError, match="Unknown verify target"):
        RunConfig(command=CommandType.VERIFY, target="thm3")


def test_renderers():
    """Test the CSV layout, the JSON encoding of fractions and the table rows."""
    assert render_csv([0.5], [2.0]) == "x,density\n5.000000000000e-01,2.000000000000e+00\n"
    assert json.loads(render_json({"value": Fraction(1, 3)})) == {"value": "1/3"}
    table = build_table({"command": "verify thm1", "identities": [{"name": "mean_regression", "residual_max": 0.0, "pass": True}]})
    assert table.row_count == 1


def test_moments(runner):
    """Test exact moments of nu(2, 1)."""
    result = invoke(runner, ["moments", "poisson:2,1", "--n-max", "4"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["command"] == "moments"
    assert data["result"]["moments"] == [2.0, 6.0, 22.0, 90.0]
    assert data["result"]["moments_exact"] == ["2", "6", "22", "90"]
    assert data["wall_time_ms"] >= 0


def test_density_csv(runner, tmp_path):
    """Test the CSV density table on stdout and in a file."""
    result = invoke(runner, ["density", "binomial:1,2", "--points", "5", "--format", "csv"])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == "x,density"
    assert len(lines) == 6

    target = tmp_path / "beta.csv"
    result = invoke(runner, ["density", "binomial:1,2", "--points", "5", "--format", "csv", "-o", str(target)])
    assert result.exit_code == 0
    assert target.read_text().splitlines() == lines


def test_density_at_points(runner):
    """Test density evaluation at chosen points, atoms included in the report."""
    result = invoke(runner, ["density", "poisson:1/2,1", "--at", "1.0", "--at", "0.5"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["x"] == [0.5, 1.0]
    assert data["atoms"] == [[0.0, 0.5]]


def test_csv_is_refused_for_other_commands(runner):
    """Test that only density tables have a CSV encoding."""
    result = invoke(runner, ["moments", "poisson:2,1", "--format", "csv"])
    assert result.exit_code == 2
    assert "CSV output is only available" in result.output


def test_bad_law_is_infeasible(runner):
    """Test that an invalid law exits with code 2."""
    result = invoke(runner, ["moments", "binomial:1/4,1/2"])
    assert result.exit_code == 2
    assert "infeasible: sigma + theta must exceed 1" in result.output


def test_convolve_mult(runner):
    """Test that nu(3, 1) times beta(1, 2) has the Catalan moments of nu(1, 1)."""
    result = invoke(runner, ["convolve", "poisson:3,1", "binomial:1,2", "--op", "mult", "--order", "4"])
    assert result.exit_code == 0
    assert json.loads(result.output)["result"]["moments_exact"] == ["1", "2", "5", "14"]


def test_convolve_add(runner):
    """Test that nu(1, 2) + nu(2, 2) has the cumulants of nu(3, 2)."""
    result = invoke(runner, ["convolve", "poisson:1,2", "poisson:2,2", "--order", "3"])
    assert result.exit_code == 0
    data = json.loads(result.output)["result"]
    assert data["cumulants"] == [6.0, 12.0, 24.0]
    assert data["moments"][:2] == [6.0, 48.0]


def test_solve(runner):
    """Test parameter recovery from the constants of the first characterization."""
    result = invoke(runner, ["solve", "--theorem", "1", "--c", "2", "--d", "1", "--F", "2"])
    assert result.exit_code == 0
    data = json.loads(result.output)["result"]
    assert data["exact"] == {"lambda": "3", "alpha": "1", "sigma": "1", "theta": "2"}
    assert data["x_plus"] == pytest.approx(8 / 9)
    assert data["theta_forms_agree"] is True


def test_solve_infeasible(runner):
    """Test that cd <= 1 exits with code 2 and a message on stderr."""
    result = invoke(runner, ["solve", "--theorem", "1", "--c", "1", "--d", "1", "--F", "2"])
    assert result.exit_code == 2
    assert "infeasible: cd must exceed 1" in result.output


def test_solve_rejects_non_numbers(runner):
    """Test the number parameter type."""
    result = invoke(runner, ["solve", "--theorem", "2", "--c", "abc", "--d", "1", "--F", "2"])
    assert result.exit_code == 2
    assert "is not a number" in result.output


def test_verify_prop32(runner, monkeypatch):
    """Test a passing verification and the seed from the environment."""
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    result = invoke(runner, ["verify", "prop32", "--sigma", "1", "--theta", "3", "--alpha", "2", "--order", "3"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["command"] == "verify prop32"
    assert data["seed"] == DEFAULT_SEED
    assert all(entry["pass"] for entry in data["identities"])

    result = invoke(runner, ["verify", "prop32", "--order", "2"], env={SEED_ENV_VAR: "42"})
    assert json.loads(result.output)["seed"] == 42


def test_verify_table(runner):
    """Test the terminal table of the first characterization."""
    result = invoke(runner, ["verify", "thm1", "--order", "4", "--no-controls", "--format", "table"])
    assert result.exit_code == 0
    assert "mean_regression" in result.output
    assert "negative_control" not in result.output


def test_verify_lemma33(runner):
    """Test the inverse mixed cumulants of nu(2, 1)."""
    result = invoke(runner, ["verify", "lemma33", "--lam", "2", "--alpha", "1", "--order", "6"])
    assert result.exit_code == 0
    assert json.loads(result.output)["result"]["C_exact"] == ["1", "-1", "0", "0", "0", "0"]

def test_verify_lemma33_coarse_quadrature_exits_one(runner, tmp_path):
    """Test that too few quadrature nodes fail an identity with exit code 1."""
    report = tmp_path / "report.json"
    result = invoke(runner, ["verify", "lemma33", "--nodes", "16", "-o", str(report)])
    assert result.exit_code == 1
    failed = [entry["name"] for entry in json.loads(report.read_text())["identities"] if not entry["pass"]]
    assert "c1_closed_form" in failed


def test_verify_first_characterization_to_order_ten(runner):
    """Test the first characterization at the default parameters to order 10."""
    result = invoke(runner, ["verify", "thm1", "--sigma", "1", "--theta", "2", "--alpha", "1", "--order", "10"])
    assert result.exit_code == 0
    assert all(entry["pass"] for entry in json.loads(result.output)["identities"])


def test_mismatch_exits_one(runner, monkeypatch):
    """Test that disagreeing computations are a verification failure, not a usage error."""

    def disagree(*args, **kwargs):
        raise QuadratureMismatch("closed form 0.5 against quadrature 0.49")

    monkeypatch.setattr("freeregress.cli.app.verify_prop32", disagree)
    result = invoke(runner, ["verify", "prop32", "--order", "2"])
    assert result.exit_code == 1
    assert "verification failed:" in result.output
    assert "infeasible:" not in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["verify", "prop32", "--order", "2"],
        ["simulate", "--dim", "16", "--trials", "2"],
    ],
)
def test_bad_seed_in_environment(runner, args):
    """Test that a non-integer FREEREGRESS_SEED is a usage error."""
    result = invoke(runner, args, env={SEED_ENV_VAR: "abc"})
    assert result.exit_code == 2
    assert "must be an integer" in result.output



@pytest.mark.parametrize(
    "args",
    [
        ["verify", "lemma33", "--lam", "1"],
        ["verify", "thm1", "--theta", "1"],
    ],
)
def test_verify_infeasible(runner, args):
    """Test that parameters outside the region of a check exit with code 2."""
    result = invoke(runner, args)
    assert result.exit_code == 2
    assert "infeasible:" in result.output


def test_failed_verification_exits_one(runner, tmp_path, monkeypatch):
    """Test that a configuration that fails every identity gives exit code 1."""
    monkeypatch.setitem(VERIFY_CONFIG, "tolerance_prop", VERIFY_CONFIG["tolerance_prop"])
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"verify": {"tolerance_prop": -1.0}}))
    report = tmp_path / "report.json"
    result = invoke(runner, ["--config", str(config), "verify", "prop32", "--order", "2", "-o", str(report)])
    assert result.exit_code == 1
    assert not any(entry["pass"] for entry in json.loads(report.read_text())["identities"])


def test_unknown_config_section(runner, tmp_path):
    """Test that configuration files are validated."""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"plotting": {}}))
    result = invoke(runner, ["--config", str(config), "moments", "poisson:2,1"])
    assert result.exit_code == 2
    assert "Unknown configuration section" in result.output


def test_simulate(runner, tmp_path):
    """Test the Monte Carlo report shape, with the spectral distance."""
    report = tmp_path / "mc.json"
    result = invoke(
        runner,
        [
            "simulate", "--theorem", "T1", "--dim", "32", "--trials", "4", "--seed", "5",
            "--max-moment", "2", "--esd", "-o", str(report),
        ],
    )
    assert result.exit_code in (0, 1)
    data = json.loads(report.read_text())
    assert data["command"] == "simulate T1"
    assert data["seed"] == 5
    assert data["trials"] == 4
    assert len(data["identities"]) == 6
    assert data["esd"]["threshold"] == 0.05


def test_simulate_seed_from_environment(runner, tmp_path):
    """Test that FREEREGRESS_SEED applies when --seed is absent."""
    report = tmp_path / "mc.json"
    args = ["simulate", "--theorem", "T2", "--dim", "16", "--trials", "2", "--max-moment", "0", "-o", str(report)]
    invoke(runner, args, env={SEED_ENV_VAR: "77"})
    assert json.loads(report.read_text())["seed"] == 77


def test_simulate_dimension_floor(runner):
    """Test that tiny matrices are a usage error."""
    result = invoke(runner, ["simulate", "--dim", "8"])
    assert result.exit_code == 2
    assert "Dimension must be at least 16" in result.output

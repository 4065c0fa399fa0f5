import io
import json
import sys
from contextlib import redirect_stdout

import pytest

from momentdet import cli


def run_cli(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(list(argv))
    return code, buf.getvalue()


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def exp_normal_spec(tmp_path):
    return write_spec(tmp_path, {
        "version": 1,
        "factors": [{"family": "exp"}, {"family": "normal"}],
    })


@pytest.fixture
def exp_spec(tmp_path):
    return write_spec(tmp_path, {"version": 1, "factors": [{"family": "exp"}]})


class TestAnalyze:
    def test_indeterminate_exit_and_citation(self, exp_normal_spec):
        code, out = run_cli("analyze", exp_normal_spec)
        assert code == cli.EXIT_MINDET
        doc = json.loads(out)
        assert doc["conclusion"] == "M-indet"
        assert "Corollary 4" in doc["rule"]

    def test_determinate_exit(self, exp_spec):
        code, out = run_cli("analyze", exp_spec)
        assert code == cli.EXIT_MDET
        doc = json.loads(out)
        assert doc["conclusion"] == "M-det"
        assert "Theorem 1" in doc["rule"]

    def test_inconclusive_exit(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [
            {"family": "GG", "alpha": 1, "beta": 0.50000001, "gamma": 1}]})
        code, out = run_cli("analyze", spec)
        assert code == cli.EXIT_INCONCLUSIVE

    def test_malformed_parameter(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [
            {"family": "GG", "alpha": 1, "beta": -2, "gamma": 1}]})
        code, _ = run_cli("analyze", spec)
        assert code == cli.EXIT_USAGE

    def test_unknown_family_named(self, tmp_path, capsys):
        spec = write_spec(tmp_path, {"factors": [{"family": "cauchy"}]})
        code, _ = run_cli("analyze", spec)
        assert code == cli.EXIT_USAGE
        assert "factors[0]" in capsys.readouterr().err

    def test_parse_error_has_position(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"factors": [}')
        code, _ = run_cli("analyze", str(path))
        assert code == cli.EXIT_USAGE
        err = capsys.readouterr().err
        assert "line" in err and "column" in err

    def test_missing_file(self, capsys):
        code, _ = run_cli("analyze", "/nonexistent/spec.json")
        assert code == cli.EXIT_USAGE

    def test_deterministic_output(self, exp_normal_spec):
        _, out1 = run_cli("analyze", exp_normal_spec)
        _, out2 = run_cli("analyze", exp_normal_spec)
        assert out1 == out2

    def test_report_round_trip(self, exp_normal_spec):
        _, out = run_cli("analyze", exp_normal_spec)
        doc = json.loads(out)
        assert doc["conclusion"] == "M-indet"
        assert doc["exponent_sum"] == pytest.approx(1.5)
        assert doc["threshold"] == 1.0
        assert [f["family"] for f in doc["input"]["factors"]] == ["GG", "DGG"]
        assert doc["factor_exponents"] == [1.0, 0.5]

    def test_ratio_flag(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [{"family": "exp"}, {"family": "exp"}]})
        code, out = run_cli("analyze", spec, "--ratio")
        assert code == cli.EXIT_MDET
        doc = json.loads(out)
        assert doc["ratio_route"]["conclusion"] == "M-det"
        assert "Theorem 6" in doc["ratio_route"]["rule"]

    def test_pretty_includes_explanation(self, exp_normal_spec):
        code, out = run_cli("analyze", exp_normal_spec, "--pretty")
        doc = json.loads(out)
        assert any("Corollary 4" in line for line in doc["explanation"])

    def test_alias_canonicalization(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [
            {"family": "chisq", "nu": 3}, {"family": "halfnormal"},
            {"family": "IG", "mu": 1, "lambda": 2}]})
        _, out = run_cli("analyze", spec)
        doc = json.loads(out)
        fams = [f["family"] for f in doc["input"]["factors"]]
        assert fams == ["GG", "GG", "IG"]
        chisq = doc["input"]["factors"][0]
        assert (chisq["alpha"], chisq["beta"], chisq["gamma"]) == (0.5, 1.0, 1.5)

    def test_rational_beta_string(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [
            {"family": "GG", "alpha": 1, "beta": "1/3", "gamma": 1}]})
        code, out = run_cli("analyze", spec)
        assert code == cli.EXIT_MINDET
        doc = json.loads(out)
        assert doc["exact_boundary_arithmetic"] is True

    def test_unknown_override_rejected(self, tmp_path, capsys):
        spec = write_spec(tmp_path, {"factors": [{"family": "exp"}],
                                     "overrides": {"tolerancee": 0.1}})
        code, _ = run_cli("analyze", spec)
        assert code == cli.EXIT_USAGE
        assert "tolerancee" in capsys.readouterr().err

    def test_schedule_override_for_krein(self, tmp_path):
        spec = write_spec(tmp_path, {
            "factors": [{"family": "normal"}],
            "overrides": {"schedule": [10.0 * 2 ** j for j in range(20)]},
        })
        code, out = run_cli("criterion", "krein", spec)
        assert code == cli.EXIT_FAILS
        assert len(json.loads(out)["evidence"]["ladder"]) == 20


class TestCriterion:
    def test_krein_counterexample(self):
        code, out = run_cli("criterion", "krein", "--counterexample", "stieltjes",
                            "--delta", "2")
        assert code == cli.EXIT_HOLDS
        doc = json.loads(out)
        assert doc["evidence"]["classification"] == "finite"

    def test_krein_counterexample_bad_delta(self, capsys):
        code, _ = run_cli("criterion", "krein", "--counterexample", "stieltjes",
                          "--delta", "1.0")
        assert code == cli.EXIT_USAGE

    def test_hardy_on_exponential(self, exp_spec):
        code, out = run_cli("criterion", "hardy", exp_spec)
        assert code == cli.EXIT_HOLDS
        doc = json.loads(out)
        assert doc["evidence"]["c0"] <= 1.0

    def test_carleman_on_heavy_factor(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [
            {"family": "GG", "alpha": 1, "beta": "1/3", "gamma": 1}]})
        code, out = run_cli("criterion", "carleman", spec)
        assert code == cli.EXIT_FAILS
        assert json.loads(out)["evidence"]["classification"] == "convergent"

    def test_growth_exit_holds(self, exp_spec):
        code, out = run_cli("criterion", "growth", exp_spec)
        assert code == cli.EXIT_HOLDS

    def test_lin_requires_single_factor(self, exp_normal_spec, capsys):
        code, _ = run_cli("criterion", "lin", exp_normal_spec)
        assert code == cli.EXIT_USAGE

    def test_krein_on_normal_fails_exit(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [{"family": "normal"}]})
        code, out = run_cli("criterion", "krein", spec)
        assert code == cli.EXIT_FAILS
        assert json.loads(out)["evidence"]["classification"] == "infinite"

    def test_spec_required_without_counterexample(self, capsys):
        code, _ = run_cli("criterion", "hardy")
        assert code == cli.EXIT_USAGE


class TestVerify:
    def test_pass_and_exit_zero(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [{"family": "exp"}, {"family": "exp"}]})
        code, out = run_cli("verify", spec, "--mc", "150000", "--seed", "7", "--kmax", "4")
        assert code == cli.EXIT_OK
        doc = json.loads(out)
        assert doc["ok"] is True
        assert doc["seed"] == 7
        assert len(doc["monte_carlo"]) == 4
        assert all(r["ok"] for r in doc["oracle"])

    def test_normal_moments(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [{"family": "normal"}]})
        code, out = run_cli("verify", spec, "--mc", "150000", "--seed", "3", "--kmax", "6")
        assert code == cli.EXIT_OK
        doc = json.loads(out)
        analytic = [r["analytic"] for r in doc["monte_carlo"]]
        assert analytic == pytest.approx([0.0, 1.0, 0.0, 3.0, 0.0, 15.0], rel=1e-9)

    def test_seed_from_overrides(self, tmp_path):
        spec = write_spec(tmp_path, {
            "factors": [{"family": "exp"}],
            "overrides": {"seed": 123, "mc": 150000},
        })
        code, out = run_cli("verify", spec)
        assert code == cli.EXIT_OK
        assert json.loads(out)["seed"] == 123

    def test_determinism(self, tmp_path):
        spec = write_spec(tmp_path, {"factors": [{"family": "IG", "mu": 1, "lambda": 1}]})
        _, out1 = run_cli("verify", spec, "--mc", "120000", "--seed", "9")
        _, out2 = run_cli("verify", spec, "--mc", "120000", "--seed", "9")
        assert out1 == out2


class TestParser:
    def test_version_flag(self):
        code, _ = run_cli("--version")
        assert code == 0

    def test_no_command_is_usage_error(self):
        code, _ = run_cli()
        assert code == cli.EXIT_USAGE

    def test_unknown_criterion_choice(self, exp_spec):
        code, _ = run_cli("criterion", "bogus", exp_spec)
        assert code == cli.EXIT_USAGE

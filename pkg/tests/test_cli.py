"""End-to-end tests of the command-line frontend."""

import json
import math

import numpy as np
import pytest

from isograd.cli import OUT_OF_SCOPE, Report, RunConfig, main, render
from isograd.errors import BadParams


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def roundtrip(text: str) -> str:
    return json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"


class TestRunConfig:
    def test_defaults_are_valid(self):
        config = RunConfig(command="dice")
        assert config.format == "text"
        assert config.precision == 6
        assert config.grid == 401

    def test_rejects_small_grid(self):
        with pytest.raises(BadParams):
            RunConfig(command="surface", grid=10)

    def test_rejects_unknown_format(self):
        with pytest.raises(BadParams):
            RunConfig(command="dice", format="yaml")

    def test_rejects_bad_precision_seed_samples_tolerance(self):
        with pytest.raises(BadParams):
            RunConfig(command="dice", precision=0)
        with pytest.raises(BadParams):
            RunConfig(command="dice", seed=-1)
        with pytest.raises(BadParams):
            RunConfig(command="table1", samples=0)
        with pytest.raises(BadParams):
            RunConfig(command="gaussian-check", tolerance=-1.0)


class TestExitCodes:
    def test_no_command_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys)
        assert code == 2 and out == ""

    def test_unknown_command_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "frobnicate")
        assert code == 2

    def test_unknown_flag_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "dice", "--verbose")
        assert code == 2

    def test_bad_format_choice(self, capsys):
        code, out, err = run_cli(capsys, "dice", "--format", "yaml")
        assert code == 2

    def test_help_exits_zero(self, capsys):
        code, out, err = run_cli(capsys, "--help")
        assert code == 0
        assert "isograd" in out

    def test_subcommand_help_exits_zero(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--help")
        assert code == 0

    def test_small_grid_rejected(self, capsys):
        code, out, err = run_cli(capsys, "tree-opt", "--sweep", "--grid", "5")
        assert code == 2
        assert "grid" in err

    def test_tree_opt_needs_exactly_one_target(self, capsys):
        code, out, err = run_cli(capsys, "tree-opt")
        assert code == 2
        code, out, err = run_cli(capsys, "tree-opt", "--rho", "0.5", "--sweep")
        assert code == 2

    def test_missing_point_rejected(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "entropy-gradient")
        assert code == 2
        assert "--point" in err

    def test_missing_counts_rejected(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "mle")
        assert code == 2
        assert "--counts" in err

    def test_malformed_point_rejected(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "fisher",
                                 "--point", "0.5,0.5")
        assert code == 2
        code, out, err = run_cli(capsys, "joint", "--op", "fisher",
                                 "--point", "a,b,c,d")
        assert code == 2

    def test_unsupported_mode_rejected(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "fisher",
                                 "--mode", "limit",
                                 "--point", "0.5,0,0,0.5")
        assert code == 2

    def test_grid_refinement_disagreement_is_exit_3(self, capsys):
        code, out, err = run_cli(capsys, "tree-opt", "--rho", "0.25",
                                 "--grid", "51")
        assert code == 3
        assert err.startswith("error:")

    def test_success_is_exit_0(self, capsys):
        code, out, err = run_cli(capsys, "dice")
        assert code == 0 and out


class TestTextFormat:
    def test_dice_table(self, capsys):
        code, out, err = run_cli(capsys, "dice")
        assert code == 0
        assert "0.693147" in out
        assert "per-space" in out and "constrained-target" in out
        assert out.rstrip().endswith("winners: true")

    def test_game_table(self, capsys):
        code, out, err = run_cli(capsys, "game")
        assert code == 0
        chosen_rows = [line for line in out.splitlines()
                       if line.rstrip().endswith("true")]
        assert len(chosen_rows) == 1
        assert "rho=+1" in chosen_rows[0]

    def test_precision_flag_changes_rendering(self, capsys):
        code, brief, err = run_cli(capsys, "dice", "--precision", "3")
        code, full, err = run_cli(capsys, "dice", "--precision", "12")
        assert "0.693" in brief and "0.693147" not in brief
        assert "0.69314718056" in full

    def test_columns_align(self, capsys):
        code, out, err = run_cli(capsys, "gaussian-check")
        lines = out.splitlines()
        header, rule = lines[1], lines[2]
        assert set(rule) <= {"-", " "}
        assert len(header) <= len(rule) + 2


class TestCsvFormat:
    def test_header_and_row_shape(self, capsys):
        code, out, err = run_cli(capsys, "gaussian-check", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "relation,mode,statistic,expected,passed"
        assert len(lines) == 7
        assert all(line.endswith("true") for line in lines[1:])
        assert "\r" not in out

    def test_sweep_rows(self, capsys):
        code, out, err = run_cli(capsys, "tree-opt", "--sweep",
                                 "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "rho,value,p,q,r,boundary,global_best"
        assert len(lines) == 10
        values = [float(line.split(",")[1]) for line in lines[1:]]
        np.testing.assert_allclose(
            values, [1.0, 1.03032, 1.40068, 2.02693, 3, 3, 3, 3, 3],
            atol=1e-3)
        assert lines[-1].split(",")[0] == "-1"
        assert lines[-1].endswith("true")
        assert sum(line.endswith(",true") for line in lines[1:]) == 1

    def test_surface_points_on_degenerate_slice(self, capsys):
        code, out, err = run_cli(capsys, "surface", "--rho", "1",
                                 "--grid", "11", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "p,q,r"
        assert len(lines) == 12
        for line in lines[1:]:
            p, q, r = (float(v) for v in line.split(","))
            assert q == 0.0 and r == 1.0

    def test_decimal_point_is_dot(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "mle",
                                 "--counts", "3,0,0,7", "--format", "csv")
        assert out.splitlines()[1] == "3,0,0,7,0.3,0,0,0.7"


class TestJsonFormat:
    @pytest.mark.parametrize("argv", [
        ("game",),
        ("gaussian-check",),
        ("report-eq1-4",),
        ("joint", "--op", "mle", "--counts", "5,0,0,5"),
        ("tree-opt", "--rho", "0.5"),
        ("table1", "--case", "ind", "--samples", "2"),
    ])
    def test_output_round_trips_byte_identically(self, capsys, argv):
        code, out, err = run_cli(capsys, *argv, "--format", "json")
        assert code == 0
        assert roundtrip(out) == out

    def test_fisher_matrix_payload(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "fisher",
                                 "--point", "0.5,0,0,0.5", "--format", "json")
        payload = json.loads(out)
        assert payload["dimension"] == 1
        assert payload["matrix"] == [[4.0]]

    def test_tree_opt_single_slice_payload(self, capsys):
        code, out, err = run_cli(capsys, "tree-opt", "--rho", "0.5",
                                 "--format", "json")
        payload = json.loads(out)
        assert payload["grid"] == 401
        assert payload["best"]["value"] == pytest.approx(1.40068, abs=1e-3)
        assert payload["best"]["diagnostics"]["boundary"] is True

    def test_game_payload(self, capsys):
        code, out, err = run_cli(capsys, "game", "--format", "json")
        payload = json.loads(out)
        assert payload["baseline"]["payoffs"] == [2.0, 2.0]
        assert payload["chosen"]["label"] == "rho=+1"
        assert payload["chosen"]["payoffs"] == [4.0, 3.0]
        assert [s["label"] for s in payload["slices"]] == [
            "rho=-1", "rho=0", "rho=+1"]

    def test_diverging_gradient_has_no_infinities(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "entropy-gradient",
                                 "--mode", "limit", "--point", "0.3,0,0,0.7",
                                 "--format", "json")
        payload = json.loads(out)
        grad = payload["gradient"]
        assert grad["kind"] == "diverging"
        assert grad["magnitude"] is None
        assert math.isfinite(grad["max_ladder_magnitude"])
        assert "Infinity" not in out


class TestHeadlineReport:
    def test_dimension_rows(self, capsys):
        code, out, err = run_cli(capsys, "report-eq1-4", "--format", "json")
        rows = {r["quantity"]: r for r in json.loads(out)["rows"]}
        assert rows["dim(F)"]["constrained"] == 1
        assert rows["dim(F)"]["limit"] == 3
        assert rows["dim(grad L)"]["constrained"] == 1
        assert rows["dim(grad L)"]["limit"] == 3
        assert rows["d"]["constrained"] == 1
        assert rows["d"]["limit"] == 3

    def test_gradient_rows_are_zero_vs_nonzero(self, capsys):
        code, out, err = run_cli(capsys, "report-eq1-4", "--format", "json")
        rows = {r["quantity"]: r for r in json.loads(out)["rows"]}
        assert rows["|grad E_xy|"]["constrained"] == 0.0
        assert rows["|grad E_xy|"]["limit"] == "diverging"
        assert rows["|grad (P00+P11)|"]["constrained"] == 0.0
        assert rows["|grad (P00+P11)|"]["limit"] == pytest.approx(
            math.sqrt(2.0), abs=1e-5)
        assert rows["|grad (E_xy-E_x)|"]["constrained"] == 0.0
        assert rows["|grad (E_xy-E_x)|"]["limit"] == "diverging"

    def test_volume_row(self, capsys):
        code, out, err = run_cli(capsys, "report-eq1-4", "--format", "json")
        rows = {r["quantity"]: r for r in json.loads(out)["rows"]}
        assert rows["V"]["constrained"] == 1.0
        assert rows["V"]["limit"] == pytest.approx(1.0 / 6.0, abs=1e-6)

    def test_unconstructed_rows_are_marked(self, capsys):
        code, out, err = run_cli(capsys, "report-eq1-4", "--format", "json")
        rows = {r["quantity"]: r for r in json.loads(out)["rows"]}
        for quantity in ("Rank(A)", "J"):
            assert rows[quantity]["constrained"] == OUT_OF_SCOPE
            assert rows[quantity]["limit"] == OUT_OF_SCOPE

    def test_text_format_carries_the_same_contrast(self, capsys):
        code, out, err = run_cli(capsys, "report-eq1-4")
        assert code == 0
        assert "diverging" in out
        assert OUT_OF_SCOPE in out


class TestJointOps:
    def test_entropy_gradient_constrained_is_flat_at_pin(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "entropy-gradient",
                                 "--point", "0.5,0,0,0.5", "--format", "json")
        payload = json.loads(out)
        assert payload["gradient"]["kind"] == "finite"
        assert payload["gradient"]["components"] == [0.0]

    def test_loglik_gradient_at_matching_counts(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "loglik-gradient",
                                 "--point", "0.5,0,0,0.5",
                                 "--counts", "5,0,0,5", "--format", "json")
        payload = json.loads(out)
        assert payload["gradient"]["components"] == [0.0]

    def test_relations_families_have_four_rows(self, capsys):
        feasible = {"correlated": "0.5,0,0,0.5",
                    "independent": "0.2,0.2,0.3,0.3"}
        for family, point in feasible.items():
            code, out, err = run_cli(capsys, "joint", "--op", "relations",
                                     "--family", family,
                                     "--point", point,
                                     "--format", "json")
            payload = json.loads(out)
            assert len(payload["rows"]) == 4
            for row in payload["rows"]:
                assert row["gradient"]["kind"] == "finite"
                np.testing.assert_allclose(row["gradient"]["components"],
                                           0.0, atol=1e-8)

    def test_unconstrained_fisher_is_three_by_three(self, capsys):
        code, out, err = run_cli(capsys, "joint", "--op", "fisher",
                                 "--mode", "unconstrained",
                                 "--point", "0.4,0.1,0.2,0.3",
                                 "--format", "json")
        payload = json.loads(out)
        assert payload["dimension"] == 3
        assert len(payload["matrix"]) == 3


class TestGameFlags:
    def test_custom_coefficients_change_the_choice(self, capsys):
        code, out, err = run_cli(capsys, "game",
                                 "--cx", "0,-2,-1.5,3",
                                 "--cy", "0,5,2,-4",
                                 "--format", "json")
        payload = json.loads(out)
        assert payload["chosen"]["label"] == "rho=0"
        assert payload["chosen"]["payoffs"][1] == 2.5

    def test_wrong_coefficient_count_rejected(self, capsys):
        code, out, err = run_cli(capsys, "game", "--cx", "1,2")
        assert code == 2

    def test_non_numeric_coefficients_rejected(self, capsys):
        code, out, err = run_cli(capsys, "game", "--cy", "a,b,c,d")
        assert code == 2


class TestDeterminism:
    def test_seeded_table_is_byte_identical(self, capsys):
        argv = ("table1", "--case", "corr", "--samples", "3",
                "--seed", "7", "--format", "json")
        code, first, err = run_cli(capsys, *argv)
        code, second, err = run_cli(capsys, *argv)
        assert first == second

    def test_sweep_is_byte_identical(self, capsys):
        argv = ("tree-opt", "--sweep", "--format", "csv")
        code, first, err = run_cli(capsys, *argv)
        code, second, err = run_cli(capsys, *argv)
        assert first == second


class TestGaussianCheckCommand:
    def test_all_rows_pass_by_default(self, capsys):
        code, out, err = run_cli(capsys, "gaussian-check", "--format", "json")
        payload = json.loads(out)
        assert payload["all_passed"] is True
        assert len(payload["rows"]) == 6

    def test_tolerance_override_recomputes_verdicts(self, capsys):
        code, out, err = run_cli(capsys, "gaussian-check",
                                 "--tol", "1e-30", "--format", "json")
        payload = json.loads(out)
        assert payload["all_passed"] is False
        modes = {row["mode"] for row in payload["rows"] if not row["passed"]}
        assert modes == {"constrained", "limit"}


class TestRenderHelpers:
    def test_cells_cover_every_scalar_type(self):
        report = Report(
            title="probe",
            columns=("a", "b", "c", "d", "e", "f"),
            rows=((None, True, 3, 0.25, (1.0, 2.0), "text"),),
            payload={"rows": []},
        )
        config = RunConfig(command="dice", format="csv")
        assert render(report, config).splitlines()[1] == \
            ",true,3,0.25,1;2,text"

    def test_json_rounds_floats_to_six_significant_digits(self):
        report = Report(title="probe", columns=("v",), rows=((1.0,),),
                        payload={"v": 1.0306749817, "w": [float("inf")]})
        config = RunConfig(command="dice", format="json")
        payload = json.loads(render(report, config))
        assert payload["v"] == 1.03067
        assert payload["w"] == ["inf"]

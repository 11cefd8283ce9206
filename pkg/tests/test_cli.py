"""End-to-end exercises of the command-line tool via click's test runner."""

import json

import pytest
from click.testing import CliRunner

from morselab.cli import cli
from morselab.divergence import parse_profile_csv

TRIANGLE = '{"vertices": ["x", "y", "z"], "edges": [["x", "y"], ["y", "z"], ["x", "z"]]}'


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args, **kwargs):
    return runner.invoke(cli, list(args), catch_exceptions=False, **kwargs)


class TestClassify:
    def test_failing_subset_reports_false_and_exits_zero(self, runner):
        res = invoke(runner, "classify", "--graph", "c4", "--subset", "a1,a2")
        assert res.exit_code == 0
        report = json.loads(res.output)
        assert report["verdicts"]["strongly_quasiconvex"] is False
        assert report["verdicts"]["stable"] is False

    def test_passing_subset_is_stable(self, runner):
        res = invoke(runner, "classify", "--graph", "c4", "--subset", "a1,b1")
        assert res.exit_code == 0
        assert json.loads(res.output)["verdicts"]["stable"] is True

    def test_triangle_graph_file_exits_two(self, runner, tmp_path):
        path = tmp_path / "tri.json"
        path.write_text(TRIANGLE)
        res = invoke(runner, "classify", "--graph", str(path), "--subset", "x,y")
        assert res.exit_code == 2
        report = json.loads(res.output)
        assert set(report["verdicts"].values()) == {"outside_scope"}

    def test_unknown_vertex_is_an_input_error(self, runner):
        res = invoke(runner, "classify", "--graph", "c4", "--subset", "a1,zz")
        assert res.exit_code == 1
        assert "error:" in res.stderr

    def test_unknown_family_is_an_input_error(self, runner):
        res = invoke(runner, "classify", "--graph", "heptagram", "--subset", "a")
        assert res.exit_code == 1

    def test_missing_required_option_exits_one_not_two(self, runner):
        # exit 2 is reserved for out-of-scope verdicts
        res = invoke(runner, "classify", "--graph", "c4")
        assert res.exit_code == 1


class TestSigma:
    ARGS = ["divergence", "sigma", "--graph", "c4", "--kind", "racg",
            "--subset", "a1,a2", "--n", "2", "--rho", "1",
            "--r", "2..3", "--rmax", "14"]

    def test_c4_profile_rows_and_summary(self, runner):
        res = invoke(runner, *self.ARGS)
        assert res.exit_code == 0
        prof = parse_profile_csv(res.output)  # '#' summary line is skipped
        assert prof.row(3).value <= 30
        assert prof.row(2).value == 4

    def test_threads_flag_does_not_change_output(self, runner):
        one = invoke(runner, *self.ARGS, "--threads", "1")
        four = invoke(runner, *self.ARGS, "--threads", "4")
        assert one.output == four.output

    def test_out_file_gets_csv_and_stdout_gets_summary(self, runner, tmp_path):
        path = tmp_path / "prof.csv"
        res = invoke(runner, *self.ARGS, "--out", str(path))
        assert res.exit_code == 0
        assert parse_profile_csv(path.read_text()).row(2).value == 4
        assert "growth:" in res.output

    def test_raag_gens_profile_matches_known_values(self, runner):
        res = invoke(
            runner, "divergence", "sigma", "--graph", "p4", "--kind", "raag",
            "--gens", "a d a,d a d", "--n", "9", "--rho", "1",
            "--r", "3..4", "--rmax", "40",
        )
        assert res.exit_code == 0
        prof = parse_profile_csv(res.output)
        assert prof.row(3).value == 152
        assert prof.row(4).value == 250

    def test_subset_and_gens_together_rejected(self, runner):
        res = invoke(runner, *self.ARGS, "--gens", "a1 a2")
        assert res.exit_code == 1
        assert "not both" in res.stderr

    def test_no_subgroup_rejected(self, runner):
        args = [a for a in self.ARGS if a not in ("--subset", "a1,a2")]
        res = invoke(runner, *args)
        assert res.exit_code == 1

    def test_bad_rho_rejected(self, runner):
        res = invoke(runner, *self.ARGS[:-4], "--r", "2..3", "--rmax", "14",
                     "--rho", "fast")
        assert res.exit_code == 1

    def test_bad_range_rejected(self, runner):
        res = invoke(runner, *self.ARGS[:8], "--r", "5..2", "--rmax", "14")
        assert res.exit_code == 1

    def test_tiny_budget_exits_three_with_guidance(self, runner):
        res = invoke(runner, *self.ARGS, "--budget", "100")
        assert res.exit_code == 3
        assert "guidance:" in res.stderr
        assert "--rmax" in res.stderr or "budget" in res.stderr

    def test_cache_dir_env_is_honoured(self, runner, tmp_path):
        res = invoke(runner, *self.ARGS,
                     env={"MORSELAB_CACHE_DIR": str(tmp_path)})
        assert res.exit_code == 0
        assert list(tmp_path.glob("ball_*.bin")), "expected a cached ball file"


class TestGeodesic:
    def test_c4_axis_is_linear(self, runner):
        res = invoke(runner, "divergence", "geodesic", "--graph", "c4",
                     "--period", "a1,a2", "--r", "2..4", "--rmax", "12")
        assert res.exit_code == 0
        assert "2,8\n" in res.output and "4,16\n" in res.output
        assert "superlinear=false" in res.output

    def test_gamma2_axis_is_superlinear(self, runner):
        res = invoke(runner, "divergence", "geodesic", "--graph", "gamma_d:2",
                     "--period", "a2,b2", "--r", "2..5", "--rmax", "12")
        assert res.exit_code == 0
        assert "superlinear=true" in res.output
        assert "2,16\n" in res.output and "5,70\n" in res.output

    def test_ball_engine_agrees_on_c4(self, runner):
        lazy = invoke(runner, "divergence", "geodesic", "--graph", "c4",
                      "--period", "a1,a2", "--r", "2..3", "--rmax", "10")
        ball = invoke(runner, "divergence", "geodesic", "--graph", "c4",
                      "--period", "a1,a2", "--r", "2..3", "--rmax", "10",
                      "--engine", "ball")
        assert lazy.output == ball.output

    def test_ldiv_reports_minimum_over_offsets(self, runner):
        res = invoke(runner, "divergence", "ldiv", "--graph", "c4",
                     "--period", "a1,a2", "--r", "2..3", "--rmax", "10")
        assert res.exit_code == 0
        assert "2,8\n" in res.output

    def test_ldiv_rejects_ball_engine(self, runner):
        res = invoke(runner, "divergence", "ldiv", "--graph", "c4",
                     "--period", "a1,a2", "--r", "2..2", "--rmax", "10",
                     "--engine", "ball")
        assert res.exit_code == 1

    def test_period_that_is_not_geodesic_rejected(self, runner):
        # a1,a1 squares to the identity in the Coxeter group
        res = invoke(runner, "divergence", "geodesic", "--graph", "c4",
                     "--period", "a1,a1", "--r", "2..2", "--rmax", "8")
        assert res.exit_code == 1


class TestDistanceAndReduce:
    def test_plain_length(self, runner):
        res = invoke(runner, "distance", "--graph", "p4", "--kind", "raag",
                     "--word", "a d a d")
        assert res.output.strip() == "4"

    def test_special_subgroup_distance(self, runner):
        res = invoke(runner, "distance", "--graph", "c4", "--word",
                     "b1 b2 b1 b2 b1", "--subset", "a1,a2")
        assert res.output.strip() == "5"

    def test_free_subgroup_distance(self, runner):
        res = invoke(runner, "distance", "--graph", "p4", "--kind", "raag",
                     "--word", "b a d a d a d", "--gens", "a d a,d a d")
        assert res.output.strip() == "7"

    def test_gens_with_adjacent_support_fall_back_to_ball(self, runner):
        # a and b commute, so the exact free-subgroup route refuses; the
        # ball search still answers within --rmax
        res = invoke(runner, "distance", "--graph", "p4", "--kind", "raag",
                     "--word", "c", "--gens", "a,b", "--rmax", "6")
        assert res.exit_code == 0
        assert res.output.strip() == "1"

    def test_reduce_cancels_and_commutes(self, runner):
        res = invoke(runner, "reduce", "--graph", "p4", "--kind", "raag",
                     "--word", "a b a^-1 d d^-1")
        assert res.output.splitlines() == ["b", "length 1"]

    def test_reduce_racg_squares_vanish(self, runner):
        res = invoke(runner, "reduce", "--graph", "c4", "--word", "a1 a1 b2")
        assert res.output.splitlines() == ["b2", "length 1"]

    def test_unparseable_word_is_an_input_error(self, runner):
        res = invoke(runner, "reduce", "--graph", "c4", "--word", "a1^2 b2")
        assert res.exit_code == 1
        assert "error:" in res.stderr


class TestWitness:
    def test_pip1_json_on_failing_subset(self, runner):
        res = invoke(runner, "witness", "pip1", "--graph", "c4",
                     "--subset", "a1,a2", "--n", "2", "--r", "2")
        assert res.exit_code == 0
        data = json.loads(res.output)
        assert data["length"] == 20  # (4n+2) r with n=2, r=2
        assert len(data["path"]) == 21
        assert len(data["endpoints"]) == 2

    def test_pip1_refuses_quasiconvex_subset(self, runner):
        res = invoke(runner, "witness", "pip1", "--graph", "c4",
                     "--subset", "a1,b1", "--r", "2")
        assert res.exit_code == 1
        assert "no failing pattern" in res.stderr

    def test_pip1_triangle_exits_two(self, runner, tmp_path):
        path = tmp_path / "tri.json"
        path.write_text(TRIANGLE)
        res = invoke(runner, "witness", "pip1", "--graph", str(path),
                     "--subset", "x,y", "--r", "2")
        assert res.exit_code == 2

    def test_morse_boundary_five_cycle(self, runner):
        res = invoke(runner, "witness", "morse-boundary", "--graph", "c5")
        assert res.exit_code == 0
        assert res.output.strip() == "v0 v1 v2 v3 v4"

    def test_morse_boundary_square_has_none(self, runner):
        res = invoke(runner, "witness", "morse-boundary", "--graph", "c4")
        assert res.exit_code == 0
        assert res.output.startswith("none")

    def test_morse_boundary_triangle_exits_two(self, runner, tmp_path):
        path = tmp_path / "tri.json"
        path.write_text(TRIANGLE)
        res = invoke(runner, "witness", "morse-boundary", "--graph", str(path))
        assert res.exit_code == 2


class TestRecipe:
    def test_e1_passes(self, runner):
        res = invoke(runner, "recipe", "E1")
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert len(lines) == 2
        assert all(line.startswith("PASS") for line in lines)

    def test_lowercase_name_accepted(self, runner):
        res = invoke(runner, "recipe", "e1")
        assert res.exit_code == 0

    def test_unknown_name_lists_valid_ones(self, runner):
        res = invoke(runner, "recipe", "E0")
        assert res.exit_code == 1
        assert "E1, E2, E3, E4, E5" in res.stderr

    def test_infeasible_window_is_rejected_with_reason(self, runner):
        res = invoke(runner, "recipe", "E3", "--rmax", "6")
        assert res.exit_code == 1
        assert "r_max=6 too small" in res.stderr

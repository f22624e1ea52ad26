"""Scenario file parsing, validation, and the shipped catalog."""

import pytest

from surgekit.errors import ScenarioError
from surgekit.scenario import (Scenario, load_scenario, resolve_scenario,
                               shipped_scenarios, validate)


def write(tmp_path, text, name="case.scn"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestParsing:
    def test_sections_and_comments(self, tmp_path):
        sc = load_scenario(write(tmp_path, """
# comment
[run]
kind = closedloop
name = demo

[disturbance]
target = 0.35
tau = 1

[controller]
kind = adaptive
"""))
        assert sc.name == "demo"
        assert sc.kind == "closedloop"
        assert sc.disturbance.target == 0.35
        assert sc.controller.kind == "adaptive"

    def test_dotted_keys_without_sections(self, tmp_path):
        sc = load_scenario(write(tmp_path, """
run.kind = closedloop
disturbance.target = 0.45
controller.gamma = 2.0
"""))
        assert sc.disturbance.target == 0.45
        assert sc.controller.gamma == 2.0

    def test_empty_file_is_default_scenario(self, tmp_path):
        sc = load_scenario(write(tmp_path, "", name="whatever.scn"))
        assert sc.name == "default"
        assert sc.kind == "closedloop"
        assert sc.controller.kind == "adaptive"
        assert sc.disturbance.target == 0.35

    def test_unknown_key_is_an_error(self, tmp_path):
        with pytest.raises(ScenarioError, match="unknown key .*goma"):
            load_scenario(write(tmp_path, "controller.goma = 1.0\n"))

    def test_unknown_section_is_an_error(self, tmp_path):
        with pytest.raises(ScenarioError, match="unknown key"):
            load_scenario(write(tmp_path, "[compresor]\nfoo = 1\n"))

    def test_parse_error_carries_line_number(self, tmp_path):
        with pytest.raises(ScenarioError, match="line 3"):
            load_scenario(write(tmp_path, "# one\n[run]\nkind closedloop\n"))

    def test_bad_value_names_key_and_line(self, tmp_path):
        with pytest.raises(ScenarioError, match="line 1.*run.dt"):
            load_scenario(write(tmp_path, "run.dt = fast\n"))

    def test_duplicate_key_rejected(self, tmp_path):
        with pytest.raises(ScenarioError, match="duplicate"):
            load_scenario(write(tmp_path,
                                "run.t_end = 1\nrun.t_end = 2\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="not found"):
            load_scenario(tmp_path / "nope.scn")


class TestValidation:
    def test_negative_gamma_names_key(self, tmp_path):
        with pytest.raises(ScenarioError, match="controller"):
            load_scenario(write(tmp_path, "controller.gamma = -1\n"))

    def test_bad_kind(self, tmp_path):
        with pytest.raises(ScenarioError, match="run.kind"):
            load_scenario(write(tmp_path, "run.kind = fly\n"))

    def test_simulate_needs_throttle_or_flow(self, tmp_path):
        with pytest.raises(ScenarioError, match="plant.flow or plant.g"):
            load_scenario(write(tmp_path, "run.kind = simulate\n"))

    def test_flow_domain_checked(self, tmp_path):
        with pytest.raises(ScenarioError, match="plant.flow"):
            load_scenario(write(tmp_path,
                                "run.kind = simulate\nplant.flow = 0.9\n"))

    def test_initial_state_must_be_complete(self, tmp_path):
        with pytest.raises(ScenarioError, match="phi0 and plant.psi0"):
            load_scenario(write(
                tmp_path,
                "run.kind = simulate\nplant.flow = 0.4\nplant.phi0 = 0.5\n"))

    def test_stability_range(self, tmp_path):
        with pytest.raises(ScenarioError, match="stability"):
            load_scenario(write(
                tmp_path,
                "run.kind = stability\nstability.lo = 0.6\nstability.hi = 0.2\n"))

    def test_tune_requires_constants(self, tmp_path):
        with pytest.raises(ScenarioError, match="tune.L and tune.T"):
            load_scenario(write(tmp_path, "run.kind = tune\n"))

    def test_averaging_grid(self, tmp_path):
        with pytest.raises(ScenarioError, match="averaging.n"):
            load_scenario(write(
                tmp_path, "run.kind = averaging\naveraging.n = 1\n"))

    def test_negative_dt(self, tmp_path):
        with pytest.raises(ScenarioError, match="run.dt"):
            load_scenario(write(tmp_path, "run.dt = -0.1\n"))

    def test_validate_direct(self):
        sc = Scenario(kind="tune")
        with pytest.raises(ScenarioError):
            validate(sc)


class TestCatalog:
    def test_expected_entries(self):
        names = set(shipped_scenarios())
        assert {"fig3_4", "fig6", "fig7", "fig10", "fig12", "fig14",
                "fig15", "zn", "avg"} <= names

    def test_all_shipped_scenarios_load_and_validate(self):
        for name in shipped_scenarios():
            sc = resolve_scenario(name)
            assert sc.name == name

    def test_resolve_by_name_or_error(self):
        sc = resolve_scenario("fig10")
        assert sc.kind == "closedloop"
        assert sc.disturbance.target == 0.35
        with pytest.raises(ScenarioError, match="shipped"):
            resolve_scenario("fig99")

    def test_fig14_freezes_gains_config(self):
        sc = resolve_scenario("fig14")
        assert sc.disturbance.target == 0.6
        assert sc.controller.kind == "adaptive"

    def test_fig15_is_fixed_pid(self):
        sc = resolve_scenario("fig15")
        assert sc.controller.kind == "fixed-pid"
        assert (sc.controller.kp, sc.controller.ki, sc.controller.kd) == \
            (10.0, 24.0, 1.0)

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from magnoep.config import (
    DEFAULT_OMEGA_B,
    MODES,
    PRESETS,
    RunConfig,
    config_from_dict,
    emit_config,
    parse_config,
)
from magnoep.errors import ParseError, ValidationError


class TestParse:
    def test_minimal_preset(self):
        cfg = parse_config("preset: fig2\n")
        assert cfg.mode == "preset" and cfg.preset == "fig2"

    def test_spectrum2_example(self):
        cfg = parse_config(
            "mode: spectrum2\n"
            "gamma1_over_omegab: 0.1\n"
            "gamma2_over_gamma1: -1\n"
            "j_over_gamma1: [0, 2, 401]\n"
        )
        assert cfg.is_range and len(cfg.j_values()) == 401
        m = cfg.two_mode(1.0)
        assert m.omega_b == DEFAULT_OMEGA_B
        assert m.gamma_1 == pytest.approx(0.1 * DEFAULT_OMEGA_B)
        assert m.gamma_2 == -m.gamma_1 and m.j == m.gamma_1

    def test_three_mode_frequencies(self):
        cfg = parse_config("mode: spectrum3\nomega_b: 1.0\ndelta_over_gamma1: 2\nj_over_gamma1: 1.5\n")
        m = cfg.three_mode()
        assert m.omega_2 == 1.0 and m.omega_1 == pytest.approx(1.2)
        assert m.kappa_m == -m.gamma_1 and m.g_m_lin == m.j

    def test_dynamics_defaults(self):
        cfg = parse_config("mode: dynamics3\nomega_b: 1.0\nj_over_gamma1: 0.7\n")
        assert cfg.state() == (20.0, 0.0, 20.0, 0.0, 10.0, 0.0)
        assert cfg.period == pytest.approx(2 * math.pi)
        assert cfg.dt == pytest.approx(2 * math.pi / 200)
        assert cfg.t_max == pytest.approx(200 * math.pi)

    def test_empty_document_reports_missing_mode(self):
        with pytest.raises(ValidationError) as err:
            parse_config("")
        assert any(p.startswith("mode") for p in err.value.problems)


class TestValidation:
    def test_samples_per_period_floor(self):
        with pytest.raises(ValidationError) as err:
            parse_config("mode: dynamics2\nj_over_gamma1: 1\nsamples_per_period: 5\n")
        assert err.value.problems == ["samples_per_period (line 3): must be >= 20"]

    def test_every_problem_listed(self):
        text = (
            "mode: dynamics2\n"
            "omega_b: -1\n"
            "samples_per_period: 5\n"
            "format: xml\n"
            "initial_state: [1, 0]\n"
            "colour: blue\n"
        )
        with pytest.raises(ValidationError) as err:
            parse_config(text)
        keys = sorted(p.split(" ")[0] for p in err.value.problems)
        assert keys == ["colour", "format", "initial_state", "omega_b", "samples_per_period"]
        assert all("line" in p for p in err.value.problems)

    def test_unknown_mode(self):
        with pytest.raises(ValidationError, match="mode"):
            parse_config("mode: spectrum4\n")

    def test_unknown_preset(self):
        with pytest.raises(ValidationError, match="preset"):
            parse_config("preset: fig9\n")

    @pytest.mark.parametrize(
        "body, fragment",
        [
            ("mode: spectrum2\n", "spectrum modes need"),
            ("mode: spectrum2\nj_over_gamma1: [2, 1, 10]\n", "increasing"),
            ("mode: spectrum2\nj_over_gamma1: [0, 1]\n", "[start, stop, num]"),
            ("mode: spectrum2\nj_over_gamma1: -1\n", ">= 0"),
            ("mode: dynamics2\nj_over_gamma1: [0, 1, 5]\n", "single value"),
            ("mode: locate_ep\n", "needs a bracket"),
            ("mode: locate_ep\nbracket: [2, 1]\n", "lo < hi"),
            ("mode: dynamics_full\nkappa_over_g: 0.5\n", ">= 1"),
            ("mode: dynamics2\nt_max_periods: .nan\n", "finite"),
            ("mode: dynamics2\nsamples_per_period: 20.5\n", "integer"),
            ("mode: dynamics2\ngamma1_over_omegab: 0\n", "nonzero"),
            ("mode: dynamics2\nomega_b: yes\n", "expected a number"),
        ],
    )
    def test_constraints(self, body, fragment):
        with pytest.raises(ValidationError) as err:
            parse_config(body)
        assert any(fragment in p for p in err.value.problems)

    def test_bracket_accepted_for_locate(self):
        cfg = parse_config("mode: locate_ep\nmodel: three_mode\ndelta_over_gamma1: 2\nbracket: [1, 2.5]\n")
        assert cfg.bracket == (1.0, 2.5)


class TestParseErrors:
    def test_location_reported(self):
        with pytest.raises(ParseError) as err:
            parse_config("mode: spectrum2\nj_over_gamma1: [0, 2\n")
        assert "line" in str(err.value) and "column" in str(err.value)

    def test_non_mapping(self):
        with pytest.raises(ParseError):
            parse_config("- spectrum2\n- fig2\n")

    def test_errors_are_value_errors(self):
        assert issubclass(ParseError, ValueError) and issubclass(ValidationError, ValueError)


finite = st.floats(0.01, 10, allow_nan=False)


@st.composite
def configs(draw):
    mode = draw(st.sampled_from([m for m in MODES if m != "preset"]))
    data = {
        "mode": mode,
        "omega_b": draw(finite),
        "gamma1_over_omegab": draw(st.floats(-0.5, 0.5).filter(lambda v: v != 0)),
        "gamma2_over_gamma1": draw(st.floats(-3, 3)),
        "delta_over_gamma1": draw(st.floats(-3, 3)),
        "t_max_periods": draw(finite),
        "samples_per_period": draw(st.integers(20, 1000)),
        "format": draw(st.sampled_from(["csv", "json"])),
    }
    if mode.startswith("dynamics"):
        data["j_over_gamma1"] = draw(st.floats(0, 3))
        if draw(st.booleans()):
            size = {"dynamics2": 4, "dynamics3": 6, "dynamics_full": 8}[mode]
            data["initial_state"] = draw(st.lists(st.floats(-50, 50), min_size=size, max_size=size))
    else:
        start = draw(st.floats(0, 2))
        data["j_over_gamma1"] = [start, start + draw(finite), draw(st.integers(2, 500))]
    if mode == "locate_ep":
        data["model"] = draw(st.sampled_from(["two_mode", "three_mode"]))
    if mode == "dynamics_full":
        data["kappa_over_g"] = draw(st.floats(1, 1e4))
    if draw(st.booleans()):
        data["output"] = draw(st.sampled_from(["out.csv", "runs/a b.json"]))
    return config_from_dict(data)


class TestRoundTrip:
    @given(configs())
    def test_emit_parse_identity(self, cfg):
        assert parse_config(emit_config(cfg)) == cfg

    @pytest.mark.parametrize("name", PRESETS)
    def test_preset_round_trip(self, name):
        cfg = parse_config(f"preset: {name}\n")
        assert parse_config(emit_config(cfg)) == cfg
        assert isinstance(cfg, RunConfig)

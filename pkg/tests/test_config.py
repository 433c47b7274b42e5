"""Flat key = value configuration: round trips, validation, views."""

import dataclasses

import pytest

from pingrip.config import SimConfig, config_text, load_config, parse_config, save_config
from pingrip.errors import ConfigError


def test_defaults_are_valid_and_frozen():
    sim = SimConfig()
    assert sim.blocks * sim.pins_per_block == 21
    with pytest.raises(dataclasses.FrozenInstanceError):
        sim.blocks = 4


def test_views_mirror_the_flat_fields():
    sim = SimConfig()
    g = sim.gripper()
    assert g.x_pitch_mm == sim.x_pitch_mm
    assert g.travel_mm == sim.stroke_mm + sim.height_offset_mm == 36.0
    assert g.second_moment_m4 == sim.second_moment_m4
    a = sim.asperity()
    assert a.mu == sim.mu
    assert a.angle_spread_deg == sim.asperity_spread_deg
    assert a.breakage_force_n == sim.breakage_force_n
    p = sim.scan_plan()
    assert p.start_x_mm == sim.scan_start_x_mm
    assert p.steps == sim.scan_steps
    assert p.max_descent_mm == sim.max_descent_mm == 6.0
    assert p.include_clamped is True


def test_text_round_trip_is_lossless():
    sim = SimConfig()
    assert parse_config(config_text(sim)) == sim
    custom = dataclasses.replace(sim, pull_trials=50, mu=0.4, include_clamped=False)
    assert parse_config(config_text(custom)) == custom


def test_file_round_trip(tmp_path):
    sim = dataclasses.replace(SimConfig(), scan_steps=5)
    p = tmp_path / "config.txt"
    save_config(sim, p)
    assert load_config(p) == sim


def test_parser_accepts_comments_and_blank_lines():
    text = "# comment\n\nmu = 0.35\n   # indented comment\npull_trials = 20\n"
    sim = parse_config(text)
    assert sim.mu == 0.35
    assert sim.pull_trials == 20


def test_parser_reports_unknown_keys_with_line_numbers():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("mu = 0.35\nnot_a_knob = 1\n")


def test_parser_rejects_malformed_lines():
    with pytest.raises(ConfigError):
        parse_config("mu 0.35\n")
    with pytest.raises(ConfigError):
        parse_config("mu =\n")
    with pytest.raises(ConfigError):
        parse_config("pull_trials = many\n")
    with pytest.raises(ConfigError):
        parse_config("include_clamped = maybe\n")


def test_validation_rejects_out_of_range_knobs():
    with pytest.raises(ConfigError):
        dataclasses.replace(SimConfig(), pull_trials=0)
    with pytest.raises(ConfigError):
        dataclasses.replace(SimConfig(), mu=1.2)
    with pytest.raises(ConfigError):
        dataclasses.replace(SimConfig(), press_target_frac=0.0)
    with pytest.raises(ConfigError):
        dataclasses.replace(SimConfig(), x_pitch_mm=-14.0)


def test_bool_serialization_round_trips():
    off = dataclasses.replace(SimConfig(), include_clamped=False)
    text = config_text(off)
    assert "include_clamped = false" in text
    assert parse_config(text).include_clamped is False

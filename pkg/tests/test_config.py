import math

import pytest

from talbotlau import (
    ConfigError,
    build_beamline,
    build_cradle,
    build_field_region,
    default_config,
    parse_config,
    serialize_config,
)


def test_empty_text_gives_documented_defaults():
    cfg = parse_config("")
    assert cfg == default_config()
    assert cfg.beamline.grating_period == 1e-7
    assert cfg.beamline.grating_gap == 3.06e-3
    assert cfg.beamline.open_fraction == 0.35
    assert cfg.beamline.energy_ev == 1e4
    assert cfg.cradle.edge_length == 0.054


def test_negative_gap_rejected_naming_key_and_line():
    text = "[beamline]\ngrating_gap = -1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    msg = str(err.value)
    assert "grating_gap" in msg and "line 2" in msg


def test_roundtrip_serialize_parse():
    text = """
[beamline]
energy_ev = 8800
second_slit_width = 2e-6
n_sources = 12
grid_points = 4096
[cradle]
current = 0.0025
efficiency = 1.482
[sweep]
energy_points = 5
[run]
seed = 99
"""
    cfg = parse_config(text)
    again = parse_config(serialize_config(cfg))
    assert again == cfg


def test_roundtrip_preserves_infinite_extent():
    cfg = parse_config("")
    assert math.isinf(cfg.beamline.grating_extent)
    assert parse_config(serialize_config(cfg)) == cfg


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("[beamline]\nslit_gap = 1\n")
    assert "slit_gap" in str(err.value)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("[detector]\nkind = mcp\n")
    assert "detector" in str(err.value)


def test_nan_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("[cradle]\ncurrent = nan\n")
    assert "current" in str(err.value)


def test_malformed_number_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("[beamline]\nenergy_ev = ten\n")
    assert "energy_ev" in str(err.value) and "line 2" in str(err.value)


def test_malformed_integer_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("[beamline]\nn_sources = 3.5\n")
    assert "n_sources" in str(err.value)


def test_key_before_section_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config("energy_ev = 1e4\n")
    assert "before any" in str(err.value)


def test_comments_and_blank_lines_ignored():
    text = "# run setup\n\n[beamline]\nenergy_ev = 5600  # resonance\n"
    cfg = parse_config(text)
    assert cfg.beamline.energy_ev == 5600


def test_propagator_choice_validated():
    with pytest.raises(ConfigError):
        parse_config("[beamline]\npropagator = fourier\n")
    cfg = parse_config("[beamline]\npropagator = direct\n")
    assert cfg.beamline.propagator == "direct"


def test_open_fraction_range_validated():
    with pytest.raises(ConfigError):
        parse_config("[beamline]\nopen_fraction = 1.2\n")


def test_sweep_cross_checks():
    with pytest.raises(ConfigError) as err:
        parse_config("[sweep]\nenergy_min_ev = 9000\nenergy_max_ev = 5000\n")
    assert "energy_max_ev" in str(err.value)
    with pytest.raises(ConfigError):
        parse_config("[sweep]\ncurrent_min = 0.2\ncurrent_max = -0.2\n")


def test_n_offsets_minimum():
    with pytest.raises(ConfigError):
        parse_config("[sweep]\nn_offsets = 4\n")


def test_build_beamline_maps_fields():
    text = """
[beamline]
second_slit_width = 2e-6
g2_offset = 2.5e-8
n_sources = 4
grid_points = 2048
random_phase_max = 0.5
[run]
seed = 7
"""
    cfg = parse_config(text)
    beamline = build_beamline(cfg)
    assert beamline.second_slit.width == 2e-6
    assert beamline.gratings[1].offset == 2.5e-8
    assert beamline.gratings[0].offset == 0.0
    assert beamline.n_sources == 4
    assert beamline.grid_points == 2048
    assert beamline.phase_model.rng_seed == 7
    assert beamline.phase_model.random_phase_max == 0.5


def test_build_beamline_auto_grid_when_zero():
    cfg = parse_config("[beamline]\ngrid_points = 0\n")
    assert build_beamline(cfg).grid_points is None


def test_build_cradle_and_region():
    cfg = parse_config("[cradle]\ncurrent = 0.0025\n[field]\nregion_length = 3.06e-3\n")
    cradle = build_cradle(cfg)
    assert cradle.current == 0.0025
    region = build_field_region(cfg, field=1e-6)
    assert region.length == 3.06e-3
    assert region.field == 1e-6


def test_malformed_section_header():
    with pytest.raises(ConfigError):
        parse_config("[beamline\nenergy_ev = 1\n")


def test_bare_line_rejected():
    with pytest.raises(ConfigError):
        parse_config("[beamline]\njust some words\n")

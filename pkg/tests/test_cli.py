import csv
import math

import numpy as np
import pytest

from talbotlau.cli import main

FAST_CONFIG = """
[beamline]
second_slit_width = 2e-6
n_sources = 8
[sweep]
energy_points = 3
energy_min_ev = 8500
energy_max_ev = 9100
current_min = -0.15
current_max = 0.15
current_points = 121
n_offsets = 8
[sensing]
seconds = 40
[run]
seed = 42
"""


@pytest.fixture()
def fast_config_path(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(FAST_CONFIG)
    return str(path)


def run_cli(args, capsys=None):
    code = main(args)
    return code


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def all_finite(rows):
    for row in rows:
        for cell in row[1:] if not _is_numeric(row[0]) else row:
            if _is_numeric(cell):
                assert math.isfinite(float(cell))
    return True


def _is_numeric(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def test_kinematics_command(tmp_path, fast_config_path):
    out = tmp_path / "kin.csv"
    assert run_cli(["kinematics", "--config", fast_config_path, "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["quantity", "value", "unit"]
    quantities = {row[0] for row in rows}
    assert "de_broglie_wavelength" in quantities
    assert "resonant_energy_n4" in quantities
    by_name = {row[0]: float(row[1]) for row in rows}
    assert by_name["resonant_energy_n4"] == pytest.approx(8800.0, rel=0.01)
    assert by_name["resonant_energy_n5"] == pytest.approx(5600.0, rel=0.01)
    assert all(len(row) == 3 for row in rows)
    assert all_finite(rows)


def test_fringe_command(tmp_path, fast_config_path):
    out = tmp_path / "fringe.csv"
    assert run_cli(["fringe", "--config", fast_config_path, "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["offset_m", "throughput"]
    assert len(rows) == 8
    offsets = np.array([float(r[0]) for r in rows])
    assert np.allclose(offsets, np.arange(8) * 1e-7 / 8)
    assert all(float(r[1]) >= 0 for r in rows)


def test_sweep_energy_command(tmp_path, fast_config_path):
    out = tmp_path / "sweep.csv"
    assert run_cli(["sweep-energy", "--config", fast_config_path, "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["energy_eV", "contrast"]
    assert len(rows) == 3
    assert all(0.0 <= float(r[1]) <= 1.0 for r in rows)


def test_sweep_field_period(tmp_path, fast_config_path):
    out = tmp_path / "field.csv"
    assert run_cli(["sweep-field", "--config", fast_config_path, "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["current_A", "B_T", "throughput"]
    current = np.array([float(r[0]) for r in rows])
    thr = np.array([float(r[2]) for r in rows])
    period = dominant_period(current, thr)
    # one grating period of deflection at 10 keV over 6.12 mm per the
    # nominal cradle field: about 105 mA
    assert period == pytest.approx(0.10525, abs=0.005)


def test_sweep_field_period_with_tuned_efficiency(tmp_path):
    text = FAST_CONFIG + "[cradle]\nefficiency = 1.4824\n"
    path = tmp_path / "tuned.cfg"
    path.write_text(text)
    out = tmp_path / "field.csv"
    assert run_cli(["sweep-field", "--config", str(path), "--out", str(out)]) == 0
    _, rows = read_csv(str(out))
    current = np.array([float(r[0]) for r in rows])
    thr = np.array([float(r[2]) for r in rows])
    assert dominant_period(current, thr) == pytest.approx(0.071, abs=0.005)


def dominant_period(x, y):
    y = y - y.mean()
    n = len(y)
    padded = np.zeros(64 * n)
    padded[:n] = y
    spectrum = np.abs(np.fft.rfft(padded))
    freqs = np.fft.rfftfreq(padded.size, d=x[1] - x[0])
    return 1.0 / freqs[np.argmax(spectrum)]


def test_step_command_deterministic(tmp_path, fast_config_path):
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    assert run_cli(["step", "--config", fast_config_path, "--out", str(out1)]) == 0
    assert run_cli(["step", "--config", fast_config_path, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    header, rows = read_csv(str(out1))
    assert header == ["t_s", "counts"]
    assert len(rows) == 40
    assert all(float(r[1]).is_integer() for r in rows)


def test_step_seed_flag_changes_output(tmp_path, fast_config_path):
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    assert run_cli(["step", "--config", fast_config_path, "--out", str(out1)]) == 0
    assert run_cli(["step", "--config", fast_config_path, "--seed", "43", "--out", str(out2)]) == 0
    assert out1.read_bytes() != out2.read_bytes()


def test_sensitivity_command(tmp_path, fast_config_path):
    out = tmp_path / "sens.csv"
    assert run_cli(["sensitivity", "--config", fast_config_path, "--out", str(out)]) == 0
    _, rows = read_csv(str(out))
    by_name = {r[0]: float(r[1]) for r in rows}
    assert by_name["sensitivity"] == pytest.approx(9.5e-9, rel=0.15)
    assert by_name["expected_step_snr"] == pytest.approx(4.5, abs=1.0)


def test_scale_command(tmp_path):
    out = tmp_path / "scale.csv"
    assert run_cli(["scale", "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["parameter", "value"]
    by_name = {r[0]: float(r[1]) for r in rows}
    assert by_name["scaled_sensitivity"] == pytest.approx(430e-15, rel=0.05)


def test_validate_command(tmp_path, fast_config_path):
    out = tmp_path / "val.csv"
    assert run_cli(["validate", "--config", fast_config_path, "--out", str(out)]) == 0
    header, rows = read_csv(str(out))
    assert header == ["leg", "dx_m", "required_dx_m", "status"]
    assert {r[0] for r in rows} == {"source_to_slit2", "slit2_to_g1", "g1_to_g2", "g2_to_g3"}
    assert all(r[3] == "pass" for r in rows)


def test_sources_flag_overrides(tmp_path, fast_config_path, capsys):
    assert run_cli(["fringe", "--config", fast_config_path, "--sources", "2"]) == 0
    first = capsys.readouterr().out
    assert run_cli(["fringe", "--config", fast_config_path, "--sources", "3"]) == 0
    second = capsys.readouterr().out
    assert first != second


def test_float_format_nine_significant_digits(tmp_path, fast_config_path):
    out = tmp_path / "kin.csv"
    run_cli(["kinematics", "--config", fast_config_path, "--out", str(out)])
    _, rows = read_csv(str(out))
    value = dict((r[0], r[1]) for r in rows)["de_broglie_wavelength"]
    mantissa, _, _ = value.partition("e")
    assert len(mantissa.replace("-", "").replace(".", "")) == 9


def test_lf_line_endings(tmp_path, fast_config_path):
    out = tmp_path / "kin.csv"
    run_cli(["kinematics", "--config", fast_config_path, "--out", str(out)])
    raw = out.read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")


def test_every_command_emits_consistent_finite_csv(tmp_path, fast_config_path):
    commands = ["kinematics", "fringe", "sweep-energy", "sweep-field", "step", "sensitivity", "scale", "validate"]
    for command in commands:
        out = tmp_path / f"{command}.csv"
        assert run_cli([command, "--config", fast_config_path, "--out", str(out)]) == 0
        header, rows = read_csv(str(out))
        assert rows, command
        for row in rows:
            assert len(row) == len(header), command
            for cell in row:
                if _is_numeric(cell):
                    assert math.isfinite(float(cell)), command


def test_bad_config_exits_nonzero(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("[beamline]\ngrating_gap = -1\n")
    assert run_cli(["kinematics", "--config", str(path)]) == 1
    err = capsys.readouterr().err
    assert "grating_gap" in err


def test_missing_config_file_exits_nonzero(capsys):
    assert run_cli(["kinematics", "--config", "/nonexistent/path.cfg"]) == 1
    assert "error" in capsys.readouterr().err

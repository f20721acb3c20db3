import pytest

from lislimits.config import (
    ConfigError,
    RunConfig,
    load_config,
    parse_area,
    parse_aspect_ratio,
    parse_length,
)


@pytest.mark.parametrize(
    "text, lam, value",
    [(5, None, 5.0), ("5 m", None, 5.0), ("5cm", None, 0.05), ("3 mm", None, 0.003),
     ("2 lambda", 0.01, 0.02), ("lambda/8", 1.0, 0.125)],
)
def test_parse_length(text, lam, value):
    assert parse_length(text, lam) == pytest.approx(value)


def test_parse_length_errors():
    with pytest.raises(ValueError):
        parse_length("5 furlongs")
    with pytest.raises(ValueError):
        parse_length("2 lambda")


def test_parse_area_and_ratio():
    assert parse_area("25 cm2") == pytest.approx(25e-4)
    assert parse_area("4 m2") == 4.0
    assert parse_aspect_ratio("2:1") == 2.0
    with pytest.raises(ValueError):
        parse_aspect_ratio("2-1")


def test_defaults_and_digest():
    a = load_config(None, [])
    assert isinstance(a, RunConfig)
    assert a.digest() == load_config(None, []).digest()
    assert a.digest() != load_config(None, ["geometry.d=6m"]).digest()


def test_yaml_file_and_override(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("task: dof\ngeometry:\n  type: parallel\n  wavelength: 1 cm\n  d: 5 m\n  rx_size: [5 m, 5 m]\n")
    cfg = load_config(p, ["geometry.d=10m"])
    assert cfg.task == "dof"
    assert cfg.geometry.d == 10.0
    assert cfg.geometry.wavelength == pytest.approx(0.01)


def test_error_carries_line_number(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("task: dof\ngeometry:\n  type: parallel\n  d: 5 parsecs\n")
    with pytest.raises(ConfigError) as err:
        load_config(p)
    assert "bad.yaml:4" in str(err.value)


def test_unknown_key_rejected(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("geometry:\n  colour: blue\n")
    with pytest.raises(ConfigError, match="colour"):
        load_config(p)


def test_unknown_task_rejected():
    with pytest.raises(ConfigError):
        load_config(None, ["task=dance"])

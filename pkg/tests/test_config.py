import json

import numpy as np
import pytest

from natgrowth.config import MODES, default_config, load_config, loads, validate
from natgrowth.exceptions import ConfigError
from natgrowth.grid import Grid
from natgrowth.io import write_field


def test_default_is_fixture():
    cfg = default_config()
    assert cfg.mode == "solve-both" and cfg.grid["n"] == [65, 65]
    data = cfg.make_problem()
    assert data.grid.shape == (65, 65) and data.mu == 1.0
    assert data.c0.max() == pytest.approx(1.0, abs=1e-3)
    assert data.multiplicity_mode


def test_minimal_1d_check_config():
    cfg = loads('{"mode": "check", "grid": {"n": [9]}, "c0": 0.0, "f": 1.0}')
    data = cfg.make_problem()
    assert data.grid.ndim == 1 and data.grid.h == (0.1,)
    np.testing.assert_array_equal(data.f, 1.0)


def test_json_syntax_error_has_line_and_column():
    with pytest.raises(ConfigError, match=r"cfg\.json:2:12: Expecting"):
        loads('{\n    "mode" "check"\n}', source="cfg.json")


def test_unknown_key_named():
    with pytest.raises(ConfigError, match="mu_typo"):
        loads('{"mode": "check", "mu_typo": 1.0}')
    with pytest.raises(ConfigError, match="config.grid: unknown key 'm'"):
        loads('{"grid": {"m": 3}}')


def test_mu_zero_rejected_for_multiplicity():
    with pytest.raises(ConfigError, match="multiplicity requires μ ≠ 0"):
        loads('{"mode": "solve-both", "mu": 0}')
    with pytest.raises(ConfigError):
        loads('{"mode": "check", "mu": 0.0}')


@pytest.mark.parametrize(
    "raw",
    [
        {"mode": "nope"},
        {"grid": {"n": [1]}},
        {"grid": {"n": [3, 3, 3, 3]}},
        {"grid": {"n": [5], "lengths": [-1.0]}},
        {"c0": {"type": "gaussian-bump", "width": 0.0, "amplitude": 1.0}},
        {"c0": {"type": "gaussian-bump", "amplitude": 1.0}},
        {"f": {"type": "wave"}},
        {"f": float("nan")},
        {"tol": -1.0},
        {"n_path": 2},
        {"seed": 1.5},
        {"mu": {"type": "sine-product", "amplitude": 1.0}},
        {"mu_bounds": [1.0, 0.5]},
        {"general": {"H": "cubic"}},
        {"c0": {"type": "file", "path": "missing.field"}},
        {"mode": "mms", "mms": {"levels": 1}},
    ],
)
def test_invalid_configs(raw):
    with pytest.raises(ConfigError):
        validate(raw)


def test_file_coefficient(tmp_path):
    grid = Grid.box((5, 5))
    vals = np.arange(25.0).reshape(5, 5) / 25
    write_field(tmp_path / "c0.field", grid, vals)
    (tmp_path / "cfg.json").write_text(
        json.dumps({"mode": "check", "grid": {"n": [5, 5]}, "c0": {"type": "file", "path": "c0.field"}})
    )
    cfg = load_config(tmp_path / "cfg.json")
    np.testing.assert_array_equal(cfg.make_problem().c0, vals)
    bad = {"mode": "check", "grid": {"n": [6, 5]}, "c0": {"type": "file", "path": "c0.field"}}
    with pytest.raises(ConfigError):
        validate(bad, tmp_path).make_problem()


def test_diagonal_a_and_variable_mu():
    cfg = validate(
        {
            "mode": "solve-general",
            "grid": {"n": [7, 7]},
            "A": [1.0, {"type": "constant", "value": 2.0}],
            "mu": {"type": "gaussian-bump", "width": 0.2, "amplitude": 0.5, "offset": 0.5},
            "mu_bounds": [0.5, 1.0],
        }
    )
    data = cfg.make_problem()
    assert data.variable_mu and data.mu_bounds == (0.5, 1.0)
    assert data.A.lower == 1.0 and data.A.upper == 2.0


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.json")


def test_shipped_configs_validate():
    from pathlib import Path

    root = Path(__file__).resolve().parents[1] / "configs"
    files = sorted(root.glob("*.json"))
    assert files
    for path in files:
        cfg = load_config(path)
        assert cfg.mode in MODES
        cfg.make_problem()

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from natgrowth.grid import Grid
from natgrowth.io import read_field, sha256, write_field, write_field_csv, write_json, write_log


@settings(max_examples=25, deadline=None)
@given(n=st.lists(st.integers(2, 6), min_size=1, max_size=3), seed=st.integers(0, 1000))
def test_field_round_trip(tmp_path_factory, n, seed):
    rng = np.random.default_rng(seed)
    grid = Grid.box(tuple(n), 1.0 + rng.random(len(n)))
    vals = rng.standard_normal(grid.shape) * 10.0 ** rng.integers(-300, 300)
    path = tmp_path_factory.mktemp("f") / "x.field"
    write_field(path, grid, vals)
    g2, v2 = read_field(path)
    assert g2 == grid
    np.testing.assert_array_equal(v2, vals)


def test_header_is_text(tmp_path):
    grid = Grid.box((3, 4))
    write_field(tmp_path / "a.field", grid, np.zeros((3, 4)))
    head = (tmp_path / "a.field").read_bytes().split(b"end\n")[0].decode()
    assert head.splitlines()[:3] == ["natgrowth-field 1", "N 2", "n 3 4"]


def test_read_errors(tmp_path):
    (tmp_path / "bad").write_bytes(b"hello\n")
    with pytest.raises(ValueError):
        read_field(tmp_path / "bad")
    grid = Grid.box((3,))
    write_field(tmp_path / "t.field", grid, np.ones(3))
    data = (tmp_path / "t.field").read_bytes()
    (tmp_path / "short.field").write_bytes(data[:-8])
    with pytest.raises(ValueError):
        read_field(tmp_path / "short.field")


def test_csv_and_json(tmp_path):
    grid = Grid.box((2, 2))
    write_field_csv(tmp_path / "v.csv", grid, np.arange(4.0).reshape(2, 2))
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "i0,i1,x0,x1,value" and len(lines) == 5
    write_log(tmp_path / "log.csv", [{"iteration": 0, "residual": 1.0, "energy": np.float64(2.0)}])
    assert (tmp_path / "log.csv").read_text().splitlines()[0] == "iteration,residual,energy,cerami"
    write_json(tmp_path / "d.json", {"a": np.arange(2), "b": np.nan, "c": np.bool_(True)})
    assert json.loads((tmp_path / "d.json").read_text()) == {"a": [0, 1], "b": None, "c": True}
    assert len(sha256(tmp_path / "d.json")) == 64

import json
import math
import os
from pathlib import Path

import pytest

import hextiles

DATA = Path(os.environ.get("HEXTILES_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def maup(which):
    return hextiles.load_dataset(str(DATA / "maup" / f"{which}.geojson"), str(DATA / "maup" / "variables.toml"))


def maup_config():
    return hextiles.load_tileset_config(str(DATA / "maup" / "config.toml"))


def test_grid_basics():
    grid = hextiles.HexGrid()
    h = hextiles.HexIndex(5, 3, -2)
    assert str(h) == "r5:3:-2"
    assert hextiles.HexIndex.parse("r5:3:-2") == h
    assert len(grid.boundary(h)) == 6
    e = 65536.0 * 7 ** -2.5
    assert grid.cell_area(5) == pytest.approx(1.5 * math.sqrt(3) * e * e, rel=1e-12)
    kids = grid.children(h)
    assert len(set(kids)) == 7
    assert all(grid.parent(k) == h for k in kids)
    x, y = grid.center(h)
    assert grid.cell_of_point(x, y, 5) == h
    assert h in grid.cells_covering(x - 1, y - 1, x + 1, y + 1, 5)


def test_errors_map_to_python():
    with pytest.raises(hextiles.ParseError):
        hextiles.HexIndex.parse("nope")
    with pytest.raises(hextiles.RootHasNoParent):
        hextiles.HexGrid().parent(hextiles.HexIndex(0, 0, 0))
    assert issubclass(hextiles.ConfigError, hextiles.ValidationError)
    assert issubclass(hextiles.CorruptionError, hextiles.Error)


def test_aggregate_maup_pair():
    high = hextiles.aggregate(maup("high_variance"), 4)
    low = hextiles.aggregate(maup("low_variance"), 4)
    origin = hextiles.HexIndex(4, 0, 0)
    assert high[origin]["score"]["mean"] == pytest.approx(70.0, abs=1e-9)
    assert low[origin]["score"]["mean"] == pytest.approx(70.0, abs=1e-9)
    assert high[origin]["score"]["variance"] > 5 * low[origin]["score"]["variance"]


def test_compile_save_load(tmp_path):
    ts, warnings = hextiles.compile(maup("low_variance"), maup_config(), created_at="t0")
    assert warnings == []
    assert ts.name == "maup"
    assert len(ts.content_hash) == 64
    assert ts.resolutions == (3, 5)
    tiles = ts.tiles(4)
    assert tiles and len(tiles[0]["vertices"]) == 6
    assert ts.cell(hextiles.HexIndex(4, 0, 0))["cell"] == "r4:0:0"
    assert ts.cell(hextiles.HexIndex(4, 999, 999)) is None
    assert ts.resolution_for_zoom(0.0) == 3
    assert ts.resolution_for_zoom(20.0) == 5
    path = tmp_path / "maup.hxt"
    hextiles.save(ts, str(path))
    assert hextiles.load(str(path)) == ts
    blob = ts.serialize()
    assert blob.startswith(b"HEXT 1\n")
    with pytest.raises(hextiles.CorruptionError):
        hextiles.deserialize(blob[:-1])


def test_icon_variable_must_be_zero_anchored(tmp_path):
    assert hextiles.validate_config(maup_config()) == []
    text = (DATA / "maup" / "config.toml").read_text()
    text = text.replace('icons = "demand"', 'icons = "context"').replace('ring = "context"', 'ring = "demand"')
    text = text.replace('spec = "variables.toml"', f'spec = "{DATA / "maup" / "variables.toml"}"')
    path = tmp_path / "config.toml"
    path.write_text(text)
    bad = hextiles.load_tileset_config(str(path))
    assert any("zero_anchored" in p for p in hextiles.validate_config(bad))
    with pytest.raises(hextiles.ConfigError):
        hextiles.compile(maup("low_variance"), bad)


def test_cli_entry_point(tmp_path):
    code, out, err = hextiles.run_cli(["validate", str(DATA / "election" / "config.toml")])
    assert code == 0, err
    assert out.startswith("ok:")
    code, _, err = hextiles.run_cli(["inspect", str(tmp_path / "missing.hxt")])
    assert code == 1
    assert "error" in err


def test_meta_is_plain_json():
    ts, _ = hextiles.compile(maup("high_variance"), maup_config(), created_at="t0")
    meta = ts.meta
    json.dumps(meta)
    assert meta["name"] == "maup"

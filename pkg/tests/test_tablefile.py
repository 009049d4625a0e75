import json

import numpy as np
import pytest

from monocorr import cube, families, tablefile


def test_round_trip(tmp_path):
    for f in (families.tribes(4, 2), cube.to_signed(families.majority(3)),
              cube.FunctionTable(2, [0.1, -0.5, 0.25, 1.0])):
        p = tmp_path / "t.json"
        tablefile.save_table(f, p)
        g = tablefile.load_table(p)
        assert g.kind == f.kind and np.array_equal(g.values, f.values)
        assert g.label == "t.json"


def test_family_form():
    f = tablefile.table_from_dict({"n": 3, "family": [3, 5, 6, 7]})
    assert np.array_equal(f.values, families.majority(3).values)


def test_pm1_alias():
    f = tablefile.table_from_dict({"n": 1, "kind": "pm1", "table": [-1, 1]})
    assert f.kind == cube.SIGNED
    assert tablefile.table_to_dict(f) == {"n": 1, "kind": "pm1", "table": [-1, 1]}


@pytest.mark.parametrize("bad", [
    {"kind": "pm1", "table": [1, -1]},
    {"n": 1},
    {"n": 1, "kind": "ternary", "table": [0, 1]},
    {"n": 1, "kind": "pm1", "table": [0, 1]},
    {"n": 2, "kind": "indicator01", "table": [0, 1]},
])
def test_bad_files(bad):
    with pytest.raises(cube.CubeError):
        tablefile.table_from_dict(bad)


def test_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(json.JSONDecodeError):
        tablefile.load_table(p)

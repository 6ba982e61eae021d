from __future__ import annotations

import json

import numpy as np

from edgeindex import reporting


def test_jsonable_handles_numpy_and_specials():
    obj = {"a": np.float64(1.5), "b": np.arange(3), "c": np.bool_(True), "d": float("nan"),
           "e": (np.int64(2), -np.inf)}
    out = reporting.to_jsonable(obj)
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": True, "d": "nan", "e": [2, "-inf"]}
    json.dumps(out)


def test_dumps_sorted_and_stable():
    assert reporting.dumps({"b": 1, "a": 2}) == reporting.dumps({"a": 2, "b": 1})
    assert reporting.dumps({"b": 1, "a": 2}).index('"a"') < reporting.dumps({"b": 1}).find("}") + 10


def test_csv_writer(tmp_path):
    p = reporting.write_csv(tmp_path / "x" / "t.csv", ["i", "v"], [(0, 0.1), (1, 1 / 3)])
    assert p.read_text().splitlines() == ["i,v", "0,0.1", "1,0.333333333333"]


def test_svg_outputs_are_wellformed():
    import xml.etree.ElementTree as ET
    ET.fromstring(reporting.svg_spectrum([-1, 0, 2], [(0.2, 1.5)], title="t"))
    coords = np.array([[0, 0], [1, 0], [0, 1], [1, 1]])
    ET.fromstring(reporting.svg_heatmap(coords, np.array([1.0, -1.0, 0.0, 0.5]), title="h"))


def test_write_json_roundtrip(tmp_path):
    p = reporting.write_json(tmp_path / "r.json", {"x": np.float32(0.5)})
    assert json.loads(p.read_text()) == {"x": 0.5}

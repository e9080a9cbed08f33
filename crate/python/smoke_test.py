"""Smoke test for the Python bindings.

Run with pytest, or directly: ``python python/smoke_test.py``. The extension
is imported from the installed wheel, or from ``MICROLOCAL_PY_PATH`` (a
directory holding ``microlocal_py.so``).
"""

import json
import os
import pathlib
import sys

import jsonschema

if "MICROLOCAL_PY_PATH" in os.environ:
    sys.path.insert(0, os.environ["MICROLOCAL_PY_PATH"])

import microlocal_py as ml  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent
SCHEMA = json.loads((ROOT / "schema" / "spectrum_report.schema.json").read_text())


def validate(report_text):
    report = json.loads(report_text)
    jsonschema.Draft202012Validator(SCHEMA).validate(report)
    return report


def test_listing():
    names = ml.list_experiments()
    assert names[0] == "delta_pow"
    assert "rauch_reed" in names and len(names) == 11


def test_delta_square_spectrum():
    cfg = ml.example_config("delta_pow", {"m": 2.0})
    text = ml.run_experiment(cfg)
    assert text == ml.run_experiment(cfg), "reruns must be byte-identical"
    report = validate(text)
    assert report["schema_version"] == ml.SCHEMA_VERSION
    assert report["summary"]["nonempty_points"] == 1
    assert abs(report["summary"]["max_R"] - 2.0) < 0.15


def test_valuation_and_classify_reports():
    cfg = json.loads(ml.example_config("classify"))
    report = validate(ml.run_experiment(json.dumps(cfg)))
    assert report["regularity"]["class"] == "g_infinity_with_m"
    cfg["task"] = {"kind": "valuation", "l": 1}
    cfg["net"] = {"id": "delta_pow", "params": {"m": 1.0}}
    report = validate(ml.run_experiment(json.dumps(cfg)))
    assert abs(report["valuation"]["value"] - 2.0) < 0.1


def test_fiber_endpoints():
    u = ml.fiber("eps_pow:r=1", [0.0])
    v = ml.fiber("eps_pow:r=1,log=1", [0.0])
    assert u["endpoint"] == "closed_at_R" and u["contains_R"] is False
    assert v["endpoint"] == "open_at_R" and v["contains_R"] is True
    assert abs(u["R"] - 1.0) < 0.1 and abs(v["R"] - 1.0) < 0.1
    assert ml.fiber("delta_pow:m=1", [0.5])["endpoint"] == "empty"


def test_errors_map_to_python_exceptions():
    for bad in ("{}", '{"experiment": "x", "net": {"id": "nope"}, "region": {"lo": [0], "hi": [1], "points": 9}}'):
        try:
            ml.run_experiment(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {bad}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")

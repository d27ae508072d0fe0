import enum
import json

import numpy as np
import pytest

from confindex import report
from confindex.engine import AucCurve, PhiResult
from confindex.sampler import BiasSchedule, Orientation


class Color(enum.Enum):
    RED = "red"


def test_to_jsonable_converts_numpy_and_enums():
    obj = {"a": np.float64(0.25), "b": np.int64(3), "c": np.array([1, 2]), "d": (1, 2),
           "e": Color.RED, "f": np.bool_(True), "g": float("nan"), 3: None}
    assert report.to_jsonable(obj) == {"a": 0.25, "b": 3, "c": [1, 2], "d": [1, 2],
                                       "e": "red", "f": True, "g": None, "3": None}


def test_unknown_objects_use_repr():
    class Thing:
        def __repr__(self):
            return "Thing()"

    assert report.to_jsonable({"x": Thing()}) == {"x": "Thing()"}


def test_dumps_is_canonical():
    a = report.dumps({"b": 1, "a": {"d": 0.1, "c": 2}})
    b = report.dumps({"a": {"c": 2, "d": 0.1}, "b": 1})
    assert a == b
    assert a.index('"a"') < a.index('"b"')
    assert json.loads(a)["a"]["d"] == 0.1


def _result():
    b = np.array([0, 0.5, 1.0])
    pro = AucCurve(b, [0.5, 0.7, 0.9], [0.01, 0.02, 0.03], [4, 4, 4])
    cons = AucCurve(b, [0.5, 0.3, 0.1 / 3], [0.01, 0.02, 0.04], [4, 4, 4])
    return PhiResult(Orientation.PHI, 0.5, 0.5, 0.3, 0.2, pro, cons, True, True, 0.01, 1.3,
                     0.1, 0.1, BiasSchedule(4, 2, 4), 5)


def test_curve_csv_round_trip(tmp_path):
    p = tmp_path / "c.csv"
    r = _result()
    report.write_curves(r, p)
    lines = p.read_text().splitlines()
    assert lines[0] == ",".join(report.CURVE_COLUMNS)
    back = report.read_curves(p)
    np.testing.assert_array_equal(back["mean_auc_cons"], r.cons_curve.mean_auc)
    np.testing.assert_array_equal(back["b"], r.pro_curve.b)


@pytest.mark.parametrize("text, match", [
    ("", "empty"),
    ("x,y\n1,2\n3,4\n", "needs a 'b'"),
    ("b,mean_auc\n0,0.5\n1\n", "line 3"),
    ("b,mean_auc\n0,abc\n1,0.5\n", "not a number"),
    ("b,mean_auc\n0,nan\n1,0.5\n", "non-finite"),
    ("b,mean_auc\n0,0.5\n", "at least two"),
])
def test_malformed_curve_csv(tmp_path, text, match):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(ValueError, match=match):
        report.read_curves(p)

"""Result tables: cell rendering, headers, JSON round trip."""

import json
import math

import pytest

from focsim.constants import SCHEMA_VERSION, constants_fingerprint
from focsim.tables import ResultTable, from_json, render, to_csv, to_json


def test_row_width_is_enforced():
    with pytest.raises(ValueError):
        ResultTable(columns=(), rows=())
    with pytest.raises(ValueError):
        ResultTable(columns=("a", "b"), rows=((1.0,),))


def test_csv_cell_forms():
    t = ResultTable(
        columns=("f", "i", "s", "b", "n"),
        rows=((0.1, 7, "linear", True, None), (-2.5e-17, 0, "x", False, None)),
    )
    body = to_csv(t).splitlines()
    assert body[1] == "f,i,s,b,n"
    assert body[2] == "0.10000000000000001,7,linear,true,"
    assert body[3] == "-2.4999999999999999e-17,0,x,false,"
    with pytest.raises(ValueError):
        to_csv(ResultTable(columns=("s",), rows=(("a,b",),)))


def test_csv_header_carries_the_build_metadata():
    t = ResultTable(
        columns=("a",),
        rows=((1.0,),),
        grid_n=4096,
        extra_metadata=(("metric", "principal"),),
    )
    head = to_csv(t).splitlines()[0]
    assert head == (
        f"# schema={SCHEMA_VERSION}, constants={constants_fingerprint()},"
        " grid_n=4096, metric=principal"
    )
    bare = to_csv(ResultTable(columns=("a",), rows=())).splitlines()[0]
    assert "grid_n" not in bare


def test_json_replaces_nan_and_round_trips():
    t = ResultTable(
        columns=("x", "err"),
        rows=((1.0, float("nan")), (2.0, 0.25)),
        grid_n=16,
        extra_metadata=(("metric", "axis_ratio"),),
    )
    obj = json.loads(to_json(t))
    assert obj["rows"][0][1] is None
    assert obj["metadata"]["constants_fingerprint"] == constants_fingerprint()
    assert obj["metadata"]["grid_n"] == 16
    back = from_json(to_json(t))
    assert back.columns == t.columns
    assert back.grid_n == 16
    assert back.extra_metadata == t.extra_metadata
    assert back.rows[1] == (2.0, 0.25)
    assert back.rows[0][1] is None  # the gap stays a gap


def test_render_dispatch():
    t = ResultTable(columns=("a",), rows=((1,),))
    assert render(t, "csv") == to_csv(t)
    assert render(t, "json") == to_json(t)
    with pytest.raises(ValueError):
        render(t, "yaml")


def test_seventeen_digits_round_trip_doubles():
    values = [0.1, 1.0 / 3.0, 2.718281828459045, 1e-300, 6.02e23, -0.0]
    for v in values:
        assert float(format(v, ".17g")) == v
    assert math.copysign(1.0, float(format(-0.0, ".17g"))) == -1.0

import io
import json
import random

import pytest

from vslam.core import Demonstration, GroundAction, GroundModel
from vslam.errors import MalformedRecord, SchemaMismatch
from vslam.traces import load_model, read_trace, save_model, write_trace

from conftest import pq, random_model, random_stream


def test_roundtrip_hundred_demos(tmp_path):
    rng = random.Random(1)
    model = random_model(rng, 4, 3)
    demos = random_stream(rng, model, 100)
    path = tmp_path / "t.jsonl"
    write_trace(path, model.universe, model.action_names, demos, {"seed": 1})
    tr = read_trace(path, model)
    assert tr.demos == demos
    assert tr.actions == model.action_names
    assert tr.meta["seed"] == 1
    assert tr.meta["counts"] == {"positives": len(tr.positives), "negatives": len(tr.negatives)}


def test_fail_is_null():
    u = pq()
    d = Demonstration(u.state(["p"]), "a", None)
    buf = io.StringIO()
    write_trace(buf, u, ["a"], [d])
    lines = buf.getvalue().splitlines()
    assert json.loads(lines[1]) == {"pre": ["p"], "action": "a", "post": None}
    back = read_trace(io.StringIO(buf.getvalue()))
    assert back.demos == [d] and back.demos[0].post is None


def _trace_text(records, fluents=("p", "q"), actions=("a",)):
    head = json.dumps({"fluents": list(fluents), "actions": list(actions)})
    return "\n".join([head] + [json.dumps(r) for r in records]) + "\n"


def test_unknown_fluent_and_action():
    with pytest.raises(SchemaMismatch):
        read_trace(io.StringIO(_trace_text([{"pre": ["r"], "action": "a", "post": None}])))
    with pytest.raises(SchemaMismatch):
        read_trace(io.StringIO(_trace_text([{"pre": ["p"], "action": "b", "post": None}])))


def test_header_must_match_model():
    u = pq()
    model = GroundModel(u, [GroundAction("a", 0, 0)])
    with pytest.raises(SchemaMismatch):
        read_trace(io.StringIO(_trace_text([], fluents=("p", "r"))), model)
    with pytest.raises(SchemaMismatch):
        read_trace(io.StringIO(_trace_text([], actions=("a", "z"))), model)


def test_malformed_records_report_position():
    good = {"pre": ["p"], "action": "a", "post": ["q"]}
    with pytest.raises(MalformedRecord) as info:
        read_trace(io.StringIO(_trace_text([good, good]) + "{not json\n"))
    assert info.value.index == 2
    with pytest.raises(MalformedRecord) as info:
        read_trace(io.StringIO(_trace_text([good, {"pre": ["p"], "action": "a"}])))
    assert info.value.index == 1
    with pytest.raises(MalformedRecord) as info:
        read_trace(io.StringIO("garbage\n"))
    assert info.value.index == -1


def test_empty_trace():
    u = pq()
    buf = io.StringIO()
    write_trace(buf, u, ["a"], [])
    tr = read_trace(io.StringIO(buf.getvalue()))
    assert tr.demos == [] and tr.universe == u


def test_model_file_roundtrip(tmp_path, blocksworld3):
    g = blocksworld3
    path = tmp_path / "m.json"
    save_model(path, g.model, g.init, g.goal)
    model, init, goal = load_model(path)
    assert model.universe == g.universe
    assert [(a.name, a.pre, a.eff) for a in model.actions] == [(a.name, a.pre, a.eff) for a in g.model.actions]
    assert (init, goal) == (g.init, g.goal)

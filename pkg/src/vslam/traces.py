"""Line-delimited JSON demonstration traces and ground model files.

Trace layout: the first line is a header object with ``fluents`` and
``actions`` (plus free-form metadata); every following line is one
demonstration ``{"pre": [...], "action": "...", "post": [...] | null}``.
States are listed as their true fluents; everything else is false. A
``null`` post-state marks a failed execution.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

from .core import Demonstration, FluentUniverse, GroundAction, GroundModel, LiteralSet, State
from .errors import MalformedRecord, SchemaMismatch

TRACE_FORMAT = "vslam-trace"
MODEL_FORMAT = "vslam-ground-model"


@dataclass
class Trace:
    universe: FluentUniverse
    actions: list[str]
    demos: list[Demonstration]
    meta: dict = field(default_factory=dict)

    @property
    def positives(self) -> list[Demonstration]:
        return [d for d in self.demos if d.post is not None]

    @property
    def negatives(self) -> list[Demonstration]:
        return [d for d in self.demos if d.post is None]


def _record(universe: FluentUniverse, d: Demonstration) -> dict:
    return {
        "pre": universe.true_fluents(d.pre),
        "action": d.action,
        "post": None if d.post is None else universe.true_fluents(d.post),
    }


def write_trace(
    out: str | Path | IO[str],
    universe: FluentUniverse,
    actions: Sequence[str],
    demos: Iterable[Demonstration],
    meta: dict | None = None,
) -> None:
    demos = list(demos)
    header = {"format": TRACE_FORMAT, "version": 1, **(meta or {})}
    header["fluents"] = list(universe.fluents)
    header["actions"] = list(actions)
    header["counts"] = {
        "positives": sum(d.post is not None for d in demos),
        "negatives": sum(d.post is None for d in demos),
    }
    lines = [json.dumps(header)] + [json.dumps(_record(universe, d)) for d in demos]
    text = "\n".join(lines) + "\n"
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)


def read_trace(src: str | Path | IO[str], model: GroundModel | None = None) -> Trace:
    """Read a trace; with ``model`` given, its header must match the model's schema.

    Record errors are reported with their 0-based position after the header.
    """
    if isinstance(src, (str, Path)):
        stream: IO[str] = io.StringIO(Path(src).read_text())
    else:
        stream = src
    first = stream.readline()
    try:
        header = json.loads(first)
        universe = FluentUniverse(header["fluents"])
        actions = list(header["actions"])
    except (ValueError, KeyError, TypeError) as exc:
        raise MalformedRecord(-1, f"bad header: {exc}") from None
    if model is not None:
        if universe != model.universe:
            raise SchemaMismatch("trace fluents differ from the model's")
        unknown = [a for a in actions if a not in model]
        if unknown:
            raise SchemaMismatch(f"trace declares actions unknown to the model: {unknown[:5]}")
    known = set(actions)

    def state(names, i) -> State:
        if not isinstance(names, list):
            raise MalformedRecord(i, "state must be a list of fluent names")
        for f in names:
            if f not in universe:
                raise SchemaMismatch(f"record {i}: unknown fluent {f!r}")
        return universe.state(names)

    demos = []
    for i, line in enumerate(stream):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            pre, action, post = rec["pre"], rec["action"], rec["post"]
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedRecord(i, str(exc)) from None
        if action not in known:
            raise SchemaMismatch(f"record {i}: unknown action {action!r}")
        demos.append(Demonstration(state(pre, i), action, None if post is None else state(post, i)))
    meta = {k: v for k, v in header.items() if k not in ("fluents", "actions")}
    return Trace(universe, actions, demos, meta)


# -- ground model files -------------------------------------------------------------------


def model_to_json(model: GroundModel, init: State | None = None, goal: LiteralSet | None = None) -> dict:
    u = model.universe
    return {
        "format": MODEL_FORMAT,
        "version": 1,
        "fluents": list(u.fluents),
        "actions": [
            {"name": a.name, "pre": u.literal_names(a.pre), "eff": u.literal_names(a.eff)}
            for a in model.actions
        ],
        "init": None if init is None else u.true_fluents(init),
        "goal": None if goal is None else u.literal_names(goal),
    }


def model_from_json(doc: dict) -> tuple[GroundModel, State | None, LiteralSet | None]:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a ground model file (format={doc.get('format')!r})")
    u = FluentUniverse(doc["fluents"])
    model = GroundModel(
        u, [GroundAction(a["name"], u.literals(a["pre"]), u.literals(a["eff"])) for a in doc["actions"]]
    )
    init = None if doc.get("init") is None else u.state(doc["init"])
    goal = None if doc.get("goal") is None else u.literals(doc["goal"])
    return model, init, goal


def save_model(path: str | Path, model: GroundModel, init: State | None = None, goal: LiteralSet | None = None) -> None:
    Path(path).write_text(json.dumps(model_to_json(model, init, goal), indent=1) + "\n")


def load_model(path: str | Path) -> tuple[GroundModel, State | None, LiteralSet | None]:
    return model_from_json(json.loads(Path(path).read_text()))

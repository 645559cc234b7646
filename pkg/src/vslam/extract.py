"""Sound and complete models read off learnt version spaces.

The sound model takes each action's lower boundaries (most specific
precondition, least effect). The complete model is non-deterministic: it keeps
every most-general precondition as a disjunct and the whole effect interval,
which is never materialised because membership reduces to two inclusions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence, Union

from .core import (
    Demonstration,
    FluentUniverse,
    GroundAction,
    GroundModel,
    LiteralSet,
    State,
    conflicting,
    holds,
    successor,
    transition_member,
)
from .errors import CollapsedSpace, InternalInvariantViolation, UnknownAction
from .version_space import ActionVersionSpace, Status

ND_FORMAT = "vslam-nondet-model"

SoundModel = GroundModel


@dataclass(frozen=True)
class NondetAction:
    name: str
    pre: tuple[LiteralSet, ...]
    eff_lower: LiteralSet
    eff_upper: LiteralSet


@dataclass
class NondetModel:
    universe: FluentUniverse
    actions: Sequence[NondetAction]
    _by_name: dict[str, NondetAction] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.actions = tuple(self.actions)
        self._by_name = {a.name: a for a in self.actions}
        for a in self.actions:
            if not a.pre:
                raise ValueError(f"{a.name!r} has no precondition disjuncts")
            if a.eff_lower & ~a.eff_upper:
                raise ValueError(f"{a.name!r} effect lower bound exceeds upper bound")

    def action(self, name: str) -> NondetAction:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownAction(name) from None

    @property
    def action_names(self) -> list[str]:
        return [a.name for a in self.actions]


Model = Union[GroundModel, NondetModel]


def _require(vs: ActionVersionSpace) -> None:
    if vs.pre.collapsed():
        raise CollapsedSpace(vs.action, "preconditions")
    if vs.eff.status() is Status.COLLAPSED:
        raise CollapsedSpace(vs.action, "effects")


def extract_sound(spaces: Mapping[str, ActionVersionSpace], universe: FluentUniverse) -> SoundModel:
    actions = []
    for name, vs in spaces.items():
        _require(vs)
        if conflicting(vs.eff.lower):
            raise InternalInvariantViolation(f"effect lower bound of {name!r} is conflicting")
        actions.append(GroundAction(name, vs.pre.lower, vs.eff.lower))
    return GroundModel(universe, actions)


def extract_complete(spaces: Mapping[str, ActionVersionSpace], universe: FluentUniverse) -> NondetModel:
    actions = []
    for name, vs in spaces.items():
        _require(vs)
        actions.append(NondetAction(name, tuple(vs.pre.upper), vs.eff.lower, vs.eff.upper))
    return NondetModel(universe, actions)


def nd_applicable(m: NondetModel, s: State, action: str) -> bool:
    return any(p & ~s == 0 for p in m.action(action).pre)


def nd_transition_member(m: NondetModel, d: Demonstration) -> bool:
    """Is ``<s, a, s'>`` produced by some precondition disjunct and some effect?

    An effect ``e`` yields ``s'`` from ``s`` iff ``s' - s <= e <= s'``; such an
    ``e`` exists inside ``[lower, upper]`` iff
    ``(s' - s) | lower <= s' & upper``.
    """
    if d.post is None:
        raise ValueError("transition membership needs a post-state")
    a = m.action(d.action)
    s, s2 = d.pre, d.post
    if not any(p & ~s == 0 for p in a.pre):
        return False
    return ((s2 & ~s) | a.eff_lower) & ~(s2 & a.eff_upper) == 0


class Label(str, Enum):
    POSITIVE = "POSITIVE"
    NEGATIVE = "NEGATIVE"


def label(model: Model, d: Demonstration) -> Label:
    """How ``model`` classifies a demonstration.

    A failed demonstration is labelled positive when the model would consider
    the action applicable in its pre-state.
    """
    if isinstance(model, NondetModel):
        if d.post is None:
            ok = nd_applicable(model, d.pre, d.action)
        else:
            ok = nd_transition_member(model, d)
    else:
        if d.post is None:
            ok = holds(model.action(d.action).pre, d.pre)
        else:
            ok = transition_member(model, d)
    return Label.POSITIVE if ok else Label.NEGATIVE


@dataclass(frozen=True)
class PlanningQuery:
    init: State
    goal: LiteralSet
    plan: tuple[str, ...]

    def __post_init__(self) -> None:
        if conflicting(self.goal):
            raise ValueError("goal is conflicting")


@dataclass(frozen=True)
class PlanVerdict:
    kind: str  # VALID | FAILS_AT | GOAL_UNMET
    step: int | None = None
    final_state: State | None = None

    @property
    def valid(self) -> bool:
        return self.kind == "VALID"

    def __str__(self) -> str:
        return f"FAILS_AT {self.step}" if self.kind == "FAILS_AT" else self.kind


def validate_plan(model: GroundModel, q: PlanningQuery) -> PlanVerdict:
    """Simulate ``q.plan`` from ``q.init``; steps are numbered from 1."""
    s = q.init
    for i, name in enumerate(q.plan, start=1):
        a = model.action(name)
        if not holds(a.pre, s):
            return PlanVerdict("FAILS_AT", i, s)
        s = successor(s, a.eff)
    if holds(q.goal, s):
        return PlanVerdict("VALID", None, s)
    return PlanVerdict("GOAL_UNMET", None, s)


# -- export ------------------------------------------------------------------


def nd_to_json(m: NondetModel) -> dict:
    u = m.universe
    return {
        "format": ND_FORMAT,
        "version": 1,
        "fluents": list(u.fluents),
        "actions": {
            a.name: {
                "pre_disjuncts": [u.literal_names(p) for p in a.pre],
                "eff_lower": u.literal_names(a.eff_lower),
                "eff_upper": u.literal_names(a.eff_upper),
            }
            for a in m.actions
        },
    }


def nd_from_json(doc: Mapping) -> NondetModel:
    if doc.get("format") != ND_FORMAT:
        raise ValueError(f"not a non-deterministic model (format={doc.get('format')!r})")
    u = FluentUniverse(doc["fluents"])
    actions = [
        NondetAction(
            name,
            tuple(u.literals(p) for p in rec["pre_disjuncts"]),
            u.literals(rec["eff_lower"]),
            u.literals(rec["eff_upper"]),
        )
        for name, rec in doc["actions"].items()
    ]
    return NondetModel(u, actions)


def pddl_action_name(name: str) -> str:
    return "_".join(name.split())


def _atom(fluent: str) -> str:
    return f"({fluent})"


def _conjunction(universe: FluentUniverse, x: LiteralSet) -> str:
    parts = []
    for lit in universe.literal_names(x):
        if lit.startswith("!"):
            parts.append(f"(not {_atom(lit[1:])})")
        else:
            parts.append(_atom(lit))
    return "(and " + " ".join(parts) + ")" if parts else "(and)"


def export_pddl(model: GroundModel, domain_name: str = "learnt") -> str:
    """Ground STRIPS domain: objects become constants, actions take no parameters.

    Fluent names are read as ``"predicate arg1 arg2 ..."``.
    """
    u = model.universe
    arity: dict[str, int] = {}
    constants: list[str] = []
    for f in u.fluents:
        pred, *args = f.split()
        if arity.setdefault(pred, len(args)) != len(args):
            raise ValueError(f"predicate {pred!r} used with different arities")
        for a in args:
            if a not in constants:
                constants.append(a)
    lines = [f"(define (domain {domain_name})", "  (:requirements :strips :negative-preconditions)"]
    if constants:
        lines.append("  (:constants " + " ".join(constants) + ")")
    preds = " ".join(
        "(" + " ".join([p] + [f"?x{i}" for i in range(k)]) + ")" for p, k in arity.items()
    )
    lines.append(f"  (:predicates {preds})")
    for a in model.actions:
        lines += [
            f"  (:action {pddl_action_name(a.name)}",
            "    :parameters ()",
            f"    :precondition {_conjunction(u, a.pre)}",
            f"    :effect {_conjunction(u, a.eff)})",
        ]
    lines.append(")")
    return "\n".join(lines) + "\n"


def save_nd(path: str | Path, m: NondetModel) -> None:
    Path(path).write_text(json.dumps(nd_to_json(m), indent=1) + "\n")


def enumerate_nd_transitions(
    m: NondetModel, max_fluents: int | None = None
) -> set[tuple[State, str, State]]:
    """All transitions of the non-deterministic model; exhaustive over state pairs."""
    states = list(m.universe.states(max_fluents))
    out = set()
    for s in states:
        for a in m.actions:
            if not any(p & ~s == 0 for p in a.pre):
                continue
            for s2 in states:
                if ((s2 & ~s) | a.eff_lower) & ~(s2 & a.eff_upper) == 0:
                    out.add((s, a.name, s2))
    return out

"""Per-action version spaces of preconditions and effects.

Each action keeps four boundaries:

* ``pre.lower`` -- the single most specific precondition (intersection of all
  positive pre-states), or ``None`` once removed by a failing demonstration;
* ``pre.upper`` -- the most general preconditions, a minimal antichain;
* ``eff.lower`` / ``eff.upper`` -- the effect interval. Any effect ``h`` with
  ``eff.lower <= h <= eff.upper`` reproduces every observed transition.

Preconditions are ordered by reverse inclusion and effects by inclusion, so a
precondition hypothesis ``h`` belongs to the space iff ``u <= h <= pre.lower``
for some ``u`` in ``pre.upper``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from . import kernels
from .core import Demonstration, FluentUniverse, LiteralSet, State
from .errors import (
    InternalInvariantViolation,
    NegativeWithEmptyLower,
    UnknownAction,
    UpdateAfterCollapse,
    UpperBoundaryOverflow,
    VslamError,
)

SNAPSHOT_FORMAT = "vslam-version-spaces"
SNAPSHOT_VERSION = 1


class Status(str, Enum):
    OPEN = "OPEN"
    CONVERGED = "CONVERGED"
    COLLAPSED = "COLLAPSED"


@dataclass(frozen=True)
class VsStatus:
    pre: Status
    eff: Status

    @property
    def collapsed(self) -> bool:
        return Status.COLLAPSED in (self.pre, self.eff)

    @property
    def converged(self) -> bool:
        return self.pre is Status.CONVERGED and self.eff is Status.CONVERGED


class PreconditionVS:
    """Precondition boundaries with a lazily expanded upper boundary.

    Failing states are queued and folded into ``upper`` only when it is read.
    The space itself never depends on demonstration order, so replaying the
    queue later against a smaller ``lower`` gives the same boundary as
    updating eagerly. Membership, collapse and convergence are decided from
    ``lower``, the expanded part and the queued states without expanding.
    """

    def __init__(self, lower: LiteralSet | None, upper: Iterable[LiteralSet], pending: Iterable[State] = ()):
        self.lower = lower
        self._base = list(upper)
        self._pending: dict[State, None] = dict.fromkeys(pending)

    def __repr__(self) -> str:
        return f"PreconditionVS(lower={self.lower!r}, upper={self._base!r}, pending={len(self._pending)})"

    @property
    def upper(self) -> list[LiteralSet]:
        return self.materialize()

    @upper.setter
    def upper(self, value: Iterable[LiteralSet]) -> None:
        self._base = list(value)
        self._pending.clear()

    @property
    def pending(self) -> int:
        return len(self._pending)

    def materialize(self, cap: int | None = None) -> list[LiteralSet]:
        """Fold queued failing states into the upper boundary."""
        if self._pending and self.lower is not None:
            up = self._base
            for s in self._pending:
                up = kernels.uup_update(up, self.lower, s)
                if cap is not None and len(up) > cap:
                    raise UpperBoundaryOverflow(f"upper precondition boundary would grow to {len(up)} members")
            self._base = up
        self._pending.clear()
        return self._base

    def restrict(self, s: State) -> None:
        """Keep the hypotheses contained in the positive pre-state ``s``."""
        self._base = [u for u in self._base if u & ~s == 0]
        if self.lower is not None:
            self.lower &= s
            lo = self.lower
            if any(lo & ~t == 0 for t in self._pending):
                # some queued failure now contains every remaining hypothesis
                self._base = []
                self._pending.clear()

    def queue(self, s: State) -> None:
        self._pending[s] = None

    def member(self, h: LiteralSet) -> bool:
        if self.lower is None or h & ~self.lower:
            return False
        if not any(u & ~h == 0 for u in self._base):
            return False
        return all(h & ~s for s in self._pending)

    def collapsed(self) -> bool:
        lo = self.lower
        return lo is None or not any(u & ~lo == 0 for u in self._base)

    def status(self) -> Status:
        if self.collapsed():
            return Status.COLLAPSED
        lo = self.lower
        if not self._pending:
            return Status.CONVERGED if self._base == [lo] else Status.OPEN
        # a singleton space: dropping any literal of ``lower`` leaves it
        rest = lo
        while rest:
            bit = rest & -rest
            if self.member(lo & ~bit):
                return Status.OPEN
            rest ^= bit
        return Status.CONVERGED


@dataclass
class EffectVS:
    lower: LiteralSet | None
    upper: LiteralSet | None

    def member(self, h: LiteralSet) -> bool:
        if self.lower is None or self.upper is None:
            return False
        return self.lower & ~h == 0 and h & ~self.upper == 0

    def status(self) -> Status:
        lo, up = self.lower, self.upper
        if lo is None or up is None or lo & ~up:
            return Status.COLLAPSED
        if lo == up:
            return Status.CONVERGED
        return Status.OPEN


@dataclass
class ActionVersionSpace:
    """Version spaces of one ground action, updated in place."""

    action: str
    universe: FluentUniverse
    pre: PreconditionVS
    eff: EffectVS
    positives: int = 0
    negatives: int = 0
    skipped: int = 0
    max_upper: int | None = None
    _status: VsStatus | None = field(default=None, init=False, repr=False)

    @classmethod
    def initial(
        cls, universe: FluentUniverse, action: str, max_upper: int | None = None
    ) -> "ActionVersionSpace":
        """The whole hypothesis space: preconditions in [L, {}], effects in [{}, L]."""
        full = universe.full
        return cls(
            action,
            universe,
            PreconditionVS(lower=full, upper=[0]),
            EffectVS(lower=0, upper=full),
            max_upper=max_upper,
        )

    def status(self) -> VsStatus:
        if self._status is None:
            self._status = VsStatus(self.pre.status(), self.eff.status())
        return self._status

    def collapsed(self) -> bool:
        return self.pre.collapsed() or self.eff.status() is Status.COLLAPSED

    def pre_member(self, h: LiteralSet) -> bool:
        return self.pre.member(h)

    def eff_member(self, h: LiteralSet) -> bool:
        return self.eff.member(h)

    def observe_positive(self, s: State, s_next: State) -> None:
        if self.collapsed():
            raise UpdateAfterCollapse(f"positive demonstration for collapsed action {self.action!r}")
        pre, eff = self.pre, self.eff
        pre.restrict(s)
        delta = s_next & ~s
        if eff.lower & ~s_next:
            eff.lower = None
        else:
            eff.lower |= delta
        if delta & ~eff.upper:
            eff.upper = None
        else:
            eff.upper &= s_next
        self.positives += 1
        self._status = None

    def observe_negative(self, s: State) -> None:
        pre = self.pre
        lower = pre.lower
        if lower is None:
            raise NegativeWithEmptyLower(
                f"failing demonstration for {self.action!r} after its precondition lower bound was removed"
            )
        if pre.collapsed():
            raise UpdateAfterCollapse(f"negative demonstration for collapsed action {self.action!r}")
        if self.max_upper is not None or lower & ~s == 0:
            # expand now: to enforce the cap, or because the lower bound goes away
            current = pre.materialize(self.max_upper)
            upper = kernels.uup_update(current, lower, s)
            if self.max_upper is not None and len(upper) > self.max_upper:
                raise UpperBoundaryOverflow(
                    f"upper precondition boundary of {self.action!r} would grow to {len(upper)} members"
                )
            if lower & ~s == 0:
                pre.lower = None
            pre.upper = upper
        else:
            pre.queue(s)
        self.negatives += 1
        self._status = None

    def observe(self, d: Demonstration) -> None:
        if d.post is None:
            self.observe_negative(d.pre)
        else:
            self.observe_positive(d.pre, d.post)

    def check_invariants(self) -> None:
        """Raise ``InternalInvariantViolation`` if a structural guarantee is broken."""
        pre, eff = self.pre, self.eff
        upper = pre.upper
        if pre.lower is not None:
            for u in upper:
                if u & ~pre.lower:
                    raise InternalInvariantViolation(f"{self.action}: upper member outside lower bound")
        seen = set()
        for u in upper:
            if u in seen:
                raise InternalInvariantViolation(f"{self.action}: duplicate upper member")
            seen.add(u)
        # sorted by size, a strict subset always comes first
        ordered = sorted(upper, key=int.bit_count)
        for i, u in enumerate(ordered):
            for v in ordered[i + 1:]:
                if u & ~v == 0:
                    raise InternalInvariantViolation(f"{self.action}: upper boundary is not an antichain")
        if pre.lower is None or eff.status() is Status.COLLAPSED:
            return
        if eff.lower != eff.upper & ~pre.lower:
            raise InternalInvariantViolation(f"{self.action}: effect lower != effect upper minus precondition lower")
        if (eff.upper & ~eff.lower) & ~pre.lower:
            raise InternalInvariantViolation(f"{self.action}: effect interval width escapes precondition lower")


class Learner:
    """Online learner over a fixed action catalogue.

    ``on_collapse="raise"`` rejects updates to collapsed components;
    ``"skip"`` drops them and counts them in ``ActionVersionSpace.skipped``.
    """

    def __init__(
        self,
        universe: FluentUniverse,
        actions: Iterable[str],
        *,
        max_upper: int | None = None,
        on_collapse: str = "raise",
    ):
        if on_collapse not in ("raise", "skip"):
            raise ValueError(f"on_collapse must be 'raise' or 'skip', not {on_collapse!r}")
        self.universe = universe
        self.on_collapse = on_collapse
        self.spaces: dict[str, ActionVersionSpace] = {
            a: ActionVersionSpace.initial(universe, a, max_upper) for a in actions
        }
        self.consumed = 0

    def observe(self, d: Demonstration) -> None:
        try:
            vs = self.spaces[d.action]
        except KeyError:
            raise UnknownAction(d.action) from None
        try:
            vs.observe(d)
        except UpdateAfterCollapse:
            if self.on_collapse == "raise":
                raise
            vs.skipped += 1
        self.consumed += 1

    def feed(self, demos: Iterable[Demonstration]) -> "Learner":
        for i, d in enumerate(demos):
            try:
                self.observe(d)
            except VslamError as exc:
                exc.index = i
                raise
        return self

    def status(self) -> dict[str, VsStatus]:
        return {a: vs.status() for a, vs in self.spaces.items()}


def learn(
    universe: FluentUniverse,
    actions: Iterable[str],
    demos: Iterable[Demonstration],
    **kwargs,
) -> dict[str, ActionVersionSpace]:
    """Initialise every action and process ``demos`` in stream order.

    Errors carry the offending demonstration position as ``exc.index``.
    """
    return Learner(universe, actions, **kwargs).feed(demos).spaces


# -- snapshots -------------------------------------------------------------


def _lits(universe: FluentUniverse, x: LiteralSet | None) -> list[str] | None:
    return None if x is None else universe.literal_names(x)


def snapshot(spaces: Mapping[str, ActionVersionSpace], universe: FluentUniverse) -> dict:
    actions = {}
    for name, vs in spaces.items():
        st = vs.status()
        actions[name] = {
            "hp_lower": _lits(universe, vs.pre.lower),
            "pre_upper": [universe.literal_names(u) for u in vs.pre.upper],
            "he_lower": _lits(universe, vs.eff.lower),
            "he_upper": _lits(universe, vs.eff.upper),
            "status": {"pre": st.pre.value, "eff": st.eff.value},
            "positives": vs.positives,
            "negatives": vs.negatives,
            "skipped": vs.skipped,
            "upper_size": len(vs.pre.upper),
        }
    return {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "fluents": list(universe.fluents),
        "actions": actions,
    }


def from_snapshot(doc: Mapping) -> tuple[FluentUniverse, dict[str, ActionVersionSpace]]:
    if doc.get("format") != SNAPSHOT_FORMAT:
        raise ValueError(f"not a version space snapshot (format={doc.get('format')!r})")
    if doc.get("version") != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {doc.get('version')!r}")
    universe = FluentUniverse(doc["fluents"])

    def lits(x):
        return None if x is None else universe.literals(x)

    spaces = {}
    for name, rec in doc["actions"].items():
        spaces[name] = ActionVersionSpace(
            name,
            universe,
            PreconditionVS(lits(rec["hp_lower"]), [universe.literals(u) for u in rec["pre_upper"]]),
            EffectVS(lits(rec["he_lower"]), lits(rec["he_upper"])),
            positives=rec.get("positives", 0),
            negatives=rec.get("negatives", 0),
            skipped=rec.get("skipped", 0),
        )
    return universe, spaces


def save_snapshot(path: str | Path, spaces: Mapping[str, ActionVersionSpace], universe: FluentUniverse) -> None:
    Path(path).write_text(json.dumps(snapshot(spaces, universe), indent=1) + "\n")


def load_snapshot(path: str | Path) -> tuple[FluentUniverse, dict[str, ActionVersionSpace]]:
    return from_snapshot(json.loads(Path(path).read_text()))

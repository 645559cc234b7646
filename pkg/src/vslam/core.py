"""Literal/state algebra and transition semantics.

Literal sets are plain Python ints used as bitsets over the 2n literals of a
fluent universe. Fluent ``i`` owns bit ``2*i`` (positive literal) and bit
``2*i + 1`` (negative literal). Everything here is pure set algebra on those
masks, so the learning rules stay one-liners.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import ConflictingEffect, InvalidState, UniverseTooLarge, UnknownAction

LiteralSet = int
State = int

DEFAULT_MAX_ENUMERATION = 16
NEGATION_PREFIX = "!"


@lru_cache(maxsize=None)
def _positive_mask(nwords: int) -> int:
    # every even bit over nwords 64-bit words
    return int("01" * 32 * nwords, 2)


def _mask_for(x: int) -> int:
    return _positive_mask((x.bit_length() + 63) // 64 or 1)


def literal_bit(fluent: int, positive: bool = True) -> int:
    return 1 << (2 * fluent + (0 if positive else 1))


def complement(x: LiteralSet) -> LiteralSet:
    """Swap every literal for its negation."""
    m = _mask_for(x)
    return ((x & m) << 1) | ((x >> 1) & m)


def conflicting(x: LiteralSet) -> bool:
    """True if ``x`` holds some fluent together with its negation."""
    return bool(x & (x >> 1) & _mask_for(x))


def is_subset(a: LiteralSet, b: LiteralSet) -> bool:
    return a & ~b == 0


def holds(pre: LiteralSet, s: State) -> bool:
    return pre & ~s == 0


def successor(s: State, eff: LiteralSet) -> State:
    """Apply ``eff`` to ``s``: ``(s minus complement(eff)) union eff``."""
    if conflicting(eff):
        raise ConflictingEffect("effect contains a literal and its negation")
    return (s & ~complement(eff)) | eff


def bits(x: int) -> Iterator[int]:
    """Indices of the set bits of ``x``, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def max_enumeration() -> int:
    env = os.environ.get("VSLAM_MAX_UNIVERSE")
    return int(env) if env else DEFAULT_MAX_ENUMERATION


@dataclass(frozen=True)
class Literal:
    fluent: int
    positive: bool = True

    @property
    def bit(self) -> int:
        return literal_bit(self.fluent, self.positive)

    def negate(self) -> "Literal":
        return Literal(self.fluent, not self.positive)


class FluentUniverse:
    """Ordered, fixed set of ground fluents; owns the literal numbering."""

    def __init__(self, fluents: Iterable[str]):
        self.fluents: tuple[str, ...] = tuple(fluents)
        self._index = {f: i for i, f in enumerate(self.fluents)}
        if len(self._index) != len(self.fluents):
            dupes = sorted({f for f in self.fluents if self.fluents.count(f) > 1})
            raise ValueError(f"duplicate fluents: {dupes}")
        self.n = len(self.fluents)
        # L, the full literal universe
        self.full: LiteralSet = (1 << (2 * self.n)) - 1
        self.positives: LiteralSet = self.full & _positive_mask((2 * self.n + 63) // 64 or 1)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FluentUniverse) and self.fluents == other.fluents

    def __hash__(self) -> int:
        return hash(self.fluents)

    def __repr__(self) -> str:
        return f"FluentUniverse({list(self.fluents)!r})"

    def index(self, fluent: str) -> int:
        try:
            return self._index[fluent]
        except KeyError:
            raise KeyError(f"unknown fluent {fluent!r}") from None

    def __contains__(self, fluent: str) -> bool:
        return fluent in self._index

    def literal(self, name: str) -> Literal:
        """Parse a signed literal name: ``"p"`` or ``"!p"``."""
        if name.startswith(NEGATION_PREFIX):
            return Literal(self.index(name[len(NEGATION_PREFIX):]), False)
        return Literal(self.index(name), True)

    def literals(self, names: Iterable[str]) -> LiteralSet:
        mask = 0
        for name in names:
            mask |= self.literal(name).bit
        return mask

    def literal_names(self, x: LiteralSet) -> list[str]:
        out = []
        for b in bits(x):
            name = self.fluents[b >> 1]
            out.append(NEGATION_PREFIX + name if b & 1 else name)
        return out

    def state(self, true_fluents: Iterable[str]) -> State:
        """Closed-world completion: unlisted fluents are false."""
        pos = 0
        for f in true_fluents:
            pos |= literal_bit(self.index(f))
        return pos | ((~pos & self.positives) << 1)

    def state_from_bits(self, assignment: int) -> State:
        """State whose fluent ``i`` is true iff bit ``i`` of ``assignment`` is set."""
        pos = 0
        for i in bits(assignment):
            pos |= 1 << (2 * i)
        return pos | ((~pos & self.positives) << 1)

    def true_fluents(self, s: State) -> list[str]:
        return [self.fluents[b >> 1] for b in bits(s & self.positives)]

    def is_state(self, x: LiteralSet) -> bool:
        return x & ~self.full == 0 and not conflicting(x) and x.bit_count() == self.n

    def check_state(self, x: LiteralSet) -> State:
        if not self.is_state(x):
            raise InvalidState(f"not a total consistent assignment: {self.literal_names(x)}")
        return x

    def states(self, max_fluents: int | None = None) -> Iterator[State]:
        limit = max_enumeration() if max_fluents is None else max_fluents
        if self.n > limit:
            raise UniverseTooLarge(f"{self.n} fluents exceeds enumeration bound {limit}")
        for a in range(1 << self.n):
            yield self.state_from_bits(a)


@dataclass(frozen=True)
class Demonstration:
    """Observed step ``<pre, action, post>``; ``post is None`` encodes a failure."""

    pre: State
    action: str
    post: State | None

    @property
    def positive(self) -> bool:
        return self.post is not None


@dataclass(frozen=True)
class GroundAction:
    name: str
    pre: LiteralSet
    eff: LiteralSet


@dataclass
class GroundModel:
    """Deterministic STRIPS model over a ground fluent universe.

    Effects must be conflict-free. Preconditions may conflict (such an action
    is never applicable), which is how an untouched learnt precondition looks.
    """

    universe: FluentUniverse
    actions: Sequence[GroundAction]
    _by_name: dict[str, GroundAction] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.actions = tuple(self.actions)
        self._by_name = {}
        for a in self.actions:
            if a.name in self._by_name:
                raise ValueError(f"duplicate action {a.name!r}")
            if conflicting(a.eff):
                raise ConflictingEffect(f"effect of {a.name!r} is conflicting")
            if (a.pre | a.eff) & ~self.universe.full:
                raise ValueError(f"action {a.name!r} mentions literals outside the universe")
            self._by_name[a.name] = a

    def action(self, name: str) -> GroundAction:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownAction(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    @property
    def action_names(self) -> list[str]:
        return [a.name for a in self.actions]

    def applicable(self, s: State) -> list[GroundAction]:
        return [a for a in self.actions if a.pre & ~s == 0]

    def reindex(self, universe: FluentUniverse) -> "GroundModel":
        """Same model expressed over another universe, matching fluents by name."""
        if universe == self.universe:
            return self

        def move(x: LiteralSet) -> LiteralSet:
            return universe.literals(self.universe.literal_names(x))

        return GroundModel(universe, [GroundAction(a.name, move(a.pre), move(a.eff)) for a in self.actions])


def transition_member(m: GroundModel, d: Demonstration) -> bool:
    if d.post is None:
        raise ValueError("transition membership needs a post-state")
    a = m.action(d.action)
    return holds(a.pre, d.pre) and successor(d.pre, a.eff) == d.post


def enumerate_transitions(
    m: GroundModel, max_fluents: int | None = None
) -> set[tuple[State, str, State]]:
    """All transitions ``<s, a, s'>`` of the model; exhaustive over ``2^n`` states."""
    out = set()
    for s in m.universe.states(max_fluents):
        for a in m.actions:
            if a.pre & ~s == 0:
                out.add((s, a.name, successor(s, a.eff)))
    return out

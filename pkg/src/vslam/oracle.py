"""Brute-force reference computations for tiny universes.

Nothing here touches the version space engine: consistency is decided by
evaluating every (precondition, effect) pair against every demonstration,
with the raw successor formula ``(s - complement(h)) | h``. A conflicting
effect therefore yields a non-state and never matches an observed post-state.
"""

from __future__ import annotations

import os
from typing import Iterable, Mapping

import numpy as np

from .core import Demonstration, FluentUniverse, LiteralSet, State
from .errors import UniverseTooLarge

DEFAULT_MAX_FLUENTS = 3

Pair = tuple[LiteralSet, LiteralSet]
Transition = tuple[State, str, State]


def _bound(max_fluents: int | None) -> int:
    if max_fluents is not None:
        return max_fluents
    env = os.environ.get("VSLAM_MAX_UNIVERSE")
    return int(env) if env else DEFAULT_MAX_FLUENTS


def _negate_each(h: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(h)
    for i in range(n):
        pos, neg = 1 << (2 * i), 1 << (2 * i + 1)
        out |= np.where(h & pos, neg, 0)
        out |= np.where(h & neg, pos, 0)
    return out


def raw_successor(s: int, h: int, n: int) -> int:
    comp = 0
    for i in range(n):
        if h >> (2 * i) & 1:
            comp |= 1 << (2 * i + 1)
        if h >> (2 * i + 1) & 1:
            comp |= 1 << (2 * i)
    return (s & ~comp) | h


def oracle_consistent_models(
    universe: FluentUniverse,
    actions: Iterable[str],
    demos: Iterable[Demonstration],
    max_fluents: int | None = None,
) -> dict[str, set[Pair]]:
    """Every (pre, eff) pair per action that satisfies all demonstrations.

    A pair is consistent iff for each positive ``<s, a, s'>``: ``pre <= s``
    and ``successor(s, eff) == s'``; and for each failure ``<s, a, FAIL>``:
    ``pre`` is not contained in ``s``.
    """
    n = universe.n
    if n > _bound(max_fluents):
        raise UniverseTooLarge(f"oracle enumerates 16^n pairs; n={n} exceeds {_bound(max_fluents)}")
    hyps = np.arange(1 << (2 * n), dtype=np.int64)
    comp = _negate_each(hyps, n)
    by_action: dict[str, list[Demonstration]] = {a: [] for a in actions}
    for d in demos:
        by_action[d.action].append(d)
    out = {}
    for a, ds in by_action.items():
        ok = np.ones((hyps.size, hyps.size), dtype=bool)
        for d in ds:
            pre_ok = (hyps & ~np.int64(d.pre)) == 0
            if d.post is None:
                ok &= ~pre_ok[:, None]
            else:
                eff_ok = ((np.int64(d.pre) & ~comp) | hyps) == d.post
                ok &= pre_ok[:, None] & eff_ok[None, :]
        pi, ei = np.nonzero(ok)
        out[a] = set(zip(pi.tolist(), ei.tolist()))
    return out


def pair_transitions(universe: FluentUniverse, action: str, pre: LiteralSet, eff: LiteralSet) -> set[Transition]:
    out = set()
    for s in universe.states():
        if pre & ~s == 0:
            s2 = raw_successor(s, eff, universe.n)
            if universe.is_state(s2):
                out.add((s, action, s2))
    return out


def transition_bounds(
    universe: FluentUniverse, consistent: Mapping[str, set[Pair]]
) -> tuple[set[Transition], set[Transition]]:
    """Intersection and union of the transition systems of all consistent models.

    Models combine actions independently, so both are computed per action.
    Actions without any consistent pair make the model set empty; they are
    skipped.
    """
    states = list(universe.states())
    n = universe.n
    succ: dict[LiteralSet, list] = {}
    app: dict[LiteralSet, list] = {}
    inter: set[Transition] = set()
    union: set[Transition] = set()
    for a, pairs in consistent.items():
        if not pairs:
            continue
        it = None
        un: set[Transition] = set()
        for pre, eff in pairs:
            if pre not in app:
                app[pre] = [k for k, s in enumerate(states) if pre & ~s == 0]
            if eff not in succ:
                succ[eff] = [raw_successor(s, eff, n) for s in states]
            post = succ[eff]
            ts = {(states[k], a, post[k]) for k in app[pre] if universe.is_state(post[k])}
            it = ts if it is None else it & ts
            un |= ts
        inter |= it
        union |= un
    return inter, union


def interval_members(lower: LiteralSet, upper: LiteralSet) -> Iterable[LiteralSet]:
    free = upper & ~lower
    sub = free
    while True:
        yield lower | sub
        if sub == 0:
            return
        sub = (sub - 1) & free


def nd_member_bruteforce(
    universe: FluentUniverse,
    pre_disjuncts: Iterable[LiteralSet],
    eff_lower: LiteralSet,
    eff_upper: LiteralSet,
    s: State,
    s2: State,
) -> bool:
    """Non-deterministic membership by trying every effect in the interval."""
    if not any(p & ~s == 0 for p in pre_disjuncts):
        return False
    return any(raw_successor(s, e, universe.n) == s2 for e in interval_members(eff_lower, eff_upper))


def uup_reference(upper: Iterable[LiteralSet], lower: LiteralSet, s: State) -> set[LiteralSet]:
    """Textbook specialisation step followed by quadratic minimisation."""
    upper = list(upper)
    extra = [1 << i for i in range((lower & ~s).bit_length()) if (lower & ~s) >> i & 1]
    cand = {u for u in upper if u & ~s} | {u | lb for u in upper if u & ~s == 0 for lb in extra}
    return {c for c in cand if not any(o != c and o & ~c == 0 for o in cand)}

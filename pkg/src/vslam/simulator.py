"""Seeded demonstration generation from a known true model.

Positive demonstrations come from random walks; failed ones from trying
random actions in states those walks visited. Every random stream is a
``random.Random`` seeded with a string derived from the user seed and the
stream's role, so walks are reproducible one by one.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .core import Demonstration, GroundModel, State, successor
from .errors import InsufficientNegatives, NoApplicableAction

PRNG_NAME = "python-random-mt19937/str-seed"


def stream(seed: int, *role) -> random.Random:
    return random.Random(":".join(map(str, (seed,) + role)))


def as_ratio(r) -> Fraction:
    f = Fraction(str(r)) if isinstance(r, float) else Fraction(r)
    if f < 0:
        raise ValueError(f"ratio must be non-negative, got {r}")
    return f


@dataclass
class SimConfig:
    seed: int
    length: int = 20
    restarts: int = 1
    ratio: float = 0.0
    dedupe: bool = False

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError("walk length must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        as_ratio(self.ratio)

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "SimConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def random_walk(model: GroundModel, s0: State, cfg: SimConfig) -> list[Demonstration]:
    """``cfg.restarts`` walks from ``s0``, each up to ``cfg.length`` steps.

    A walk stops early at a state with no applicable action.
    """
    out: list[Demonstration] = []
    for r in range(cfg.restarts):
        rng = stream(cfg.seed, "walk", r)
        s = s0
        for step in range(cfg.length):
            options = model.applicable(s)
            if not options:
                if step == 0:
                    warnings.warn("no action is applicable in the initial state", NoApplicableAction, stacklevel=2)
                break
            a = rng.choice(options)
            s_next = successor(s, a.eff)
            out.append(Demonstration(s, a.name, s_next))
            s = s_next
        if not out and cfg.length > 0 and not model.applicable(s0):
            break
    return out


def visited_states(demos: Iterable[Demonstration]) -> list[State]:
    """Distinct pre- and post-states, in order of first appearance."""
    seen: dict[State, None] = {}
    for d in demos:
        seen.setdefault(d.pre, None)
        if d.post is not None:
            seen.setdefault(d.post, None)
    return list(seen)


def negative_count(ratio, positives: int) -> int:
    return math.ceil(as_ratio(ratio) * positives)


def sample_negatives(
    model: GroundModel,
    visited: Sequence[State],
    ratio,
    positives: int,
    seed: int,
    dedupe: bool = False,
    role: str = "negatives",
) -> list[Demonstration]:
    """Draw ``ceil(ratio * positives)`` failing (state, action) pairs.

    Pairs are drawn uniformly from ``visited x actions`` and kept when the
    action is inapplicable. With ``dedupe`` no pair repeats; if too few exist
    the whole pool is returned with an ``InsufficientNegatives`` warning.
    """
    want = negative_count(ratio, positives)
    if want == 0:
        return []
    visited = list(dict.fromkeys(visited))
    if not visited:
        raise ValueError("negative sampling needs at least one visited state")
    rng = stream(seed, role)
    actions = model.actions
    if dedupe:
        pool = [(s, a.name) for s in visited for a in actions if a.pre & ~s]
        if len(pool) < want:
            warnings.warn(
                f"only {len(pool)} failing pairs available, {want} requested", InsufficientNegatives, stacklevel=2
            )
            rng.shuffle(pool)
            chosen = pool
        else:
            chosen = rng.sample(pool, want)
        return [Demonstration(s, a, None) for s, a in chosen]

    out: list[Demonstration] = []
    misses = 0
    checked = False
    while len(out) < want:
        s = visited[rng.randrange(len(visited))]
        a = actions[rng.randrange(len(actions))]
        if a.pre & ~s:
            out.append(Demonstration(s, a.name, None))
            continue
        misses += 1
        if misses > 10_000 and not checked:
            checked = True
            if not any(b.pre & ~t for t in visited for b in actions):
                warnings.warn("every visited (state, action) pair is applicable", InsufficientNegatives, stacklevel=2)
                break
    return out


def simulate(model: GroundModel, s0: State, cfg: SimConfig) -> list[Demonstration]:
    """Positives from ``random_walk`` followed by their ``cfg.ratio`` negatives."""
    pos = random_walk(model, s0, cfg)
    if not pos:
        return []
    neg = sample_negatives(model, visited_states(pos), cfg.ratio, len(pos), cfg.seed, cfg.dedupe)
    return pos + neg


def split(demos: Sequence, fraction: float, seed: int) -> tuple[list, list]:
    """Seeded shuffle, then the first ``floor(fraction * len)`` items train."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must lie strictly between 0 and 1")
    items = list(demos)
    stream(seed, "split").shuffle(items)
    k = math.floor(fraction * len(items))
    return items[:k], items[k:]

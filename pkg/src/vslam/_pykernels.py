"""Pure-Python boundary kernels (fallback when the compiled module is absent)."""

from __future__ import annotations

from typing import Iterable

BACKEND = "python"


def uup_update(upper: list[int], lower: int, state: int) -> list[int]:
    """Specialise the upper precondition boundary against a failing ``state``.

    ``upper`` must be a minimal antichain whose members are subsets of
    ``lower``. Members not contained in ``state`` are kept; each member
    contained in ``state`` is replaced by its one-literal extensions with
    literals of ``lower`` outside ``state``. The result is again a minimal
    antichain.

    Only one kind of redundancy can arise: an extension ``u | {l}`` may
    contain a kept member ``v`` whose sole literal outside ``state`` is ``l``
    and whose remainder lies inside ``u``. Extensions never contain each other
    and kept members never contain an extension, because ``upper`` was an
    antichain to begin with.
    """
    kept: list[int] = []
    expand: list[int] = []
    by_literal: dict[int, list[int]] = {}
    for u in upper:
        outside = u & ~state
        if outside:
            kept.append(u)
            if outside & (outside - 1) == 0:
                by_literal.setdefault(outside, []).append(u & state)
        else:
            expand.append(u)
    if not expand:
        return kept
    extra = lower & ~state
    lits = []
    while extra:
        low = extra & -extra
        lits.append(low)
        extra ^= low
    for u in expand:
        for lb in lits:
            blockers = by_literal.get(lb)
            if blockers and any(g & ~u == 0 for g in blockers):
                continue
            kept.append(u | lb)
    return kept


def minimize_antichain(sets: Iterable[int]) -> list[int]:
    """Drop duplicates and strict supersets, leaving the minimal elements.

    Output is ordered by cardinality, then by mask value.
    """
    kept: list[int] = []
    for c in sorted(set(sets), key=lambda x: (x.bit_count(), x)):
        if not any(k & ~c == 0 for k in kept):
            kept.append(c)
    return kept

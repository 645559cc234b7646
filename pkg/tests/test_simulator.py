import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vslam.core import FluentUniverse, GroundAction, GroundModel, holds, transition_member
from vslam.errors import InsufficientNegatives, NoApplicableAction
from vslam.simulator import SimConfig, as_ratio, random_walk, sample_negatives, simulate, split, visited_states


def single_action_model():
    u = FluentUniverse(["q"])
    return u, GroundModel(u, [GroundAction("a", 0, u.literals(["q"]))])


def test_zero_length_walk(blocksworld3):
    g = blocksworld3
    assert random_walk(g.model, g.init, SimConfig(seed=0, length=0)) == []
    assert simulate(g.model, g.init, SimConfig(seed=0, length=0, ratio=2)) == []


def test_single_action_walk():
    u, m = single_action_model()
    s0, s1 = u.state([]), u.state(["q"])
    walk = random_walk(m, s0, SimConfig(seed=5, length=2))
    assert [(d.pre, d.action, d.post) for d in walk] == [(s0, "a", s1), (s1, "a", s1)]


def test_dead_end_warns():
    u = FluentUniverse(["q"])
    m = GroundModel(u, [GroundAction("a", u.literals(["q"]), 0)])
    with pytest.warns(NoApplicableAction):
        assert random_walk(m, u.state([]), SimConfig(seed=1, length=3, restarts=3)) == []


def test_restarts_count_walks(blocksworld3):
    g = blocksworld3
    demos = random_walk(g.model, g.init, SimConfig(seed=2, length=7, restarts=4))
    # blocksworld never dead-ends, so each walk runs to full length
    assert len(demos) == 28
    starts = [demos[i].pre for i in range(0, 28, 7)]
    assert starts == [g.init] * 4


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 30), st.sampled_from([0, 0.5, 1, 2, 3]))
def test_walks_are_true_transitions(blocksworld3, seed, length, ratio):
    g = blocksworld3
    demos = simulate(g.model, g.init, SimConfig(seed=seed, length=length, ratio=ratio))
    pos = [d for d in demos if d.post is not None]
    neg = [d for d in demos if d.post is None]
    assert len(pos) == length
    assert all(transition_member(g.model, d) for d in pos)
    assert all(not holds(g.model.action(d.action).pre, d.pre) for d in neg)
    assert len(neg) == math.ceil(Fraction(str(ratio)) * len(pos))
    visited = set(visited_states(pos))
    assert all(d.pre in visited for d in neg)


def test_ratio_two_with_five_positives(blocksworld3):
    g = blocksworld3
    pos = random_walk(g.model, g.init, SimConfig(seed=3, length=5))
    neg = sample_negatives(g.model, visited_states(pos), 2, len(pos), seed=3)
    assert len(pos) == 5 and len(neg) == 10


def test_ratio_zero_and_rounding(blocksworld3):
    g = blocksworld3
    assert sample_negatives(g.model, [g.init], 0, 10, seed=0) == []
    assert len(sample_negatives(g.model, [g.init], Fraction(1, 3), 10, seed=0)) == 4
    assert as_ratio(0.5) == Fraction(1, 2)
    with pytest.raises(ValueError):
        as_ratio(-1)


def test_dedupe_pool_limit():
    u = FluentUniverse(["q"])
    m = GroundModel(u, [GroundAction("a", u.literals(["q"]), 0), GroundAction("b", 0, 0)])
    with pytest.warns(InsufficientNegatives):
        neg = sample_negatives(m, [u.state([])], 5, 1, seed=0, dedupe=True)
    assert len(neg) == 1
    neg = sample_negatives(m, [u.state([])], 3, 1, seed=0)
    assert len(neg) == 3


def test_all_applicable_pool_stops():
    u, m = single_action_model()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        assert sample_negatives(m, [u.state([])], 1, 1, seed=0) == []
    assert any(issubclass(w.category, InsufficientNegatives) for w in caught)


def test_determinism(blocksworld4):
    g = blocksworld4
    cfg = SimConfig(seed=11, length=25, restarts=3, ratio=1.5)
    assert simulate(g.model, g.init, cfg) == simulate(g.model, g.init, cfg)
    other = simulate(g.model, g.init, SimConfig(seed=12, length=25, restarts=3, ratio=1.5))
    assert other != simulate(g.model, g.init, cfg)


def test_split_sizes_and_determinism():
    items = list(range(10))
    train, test = split(items, 0.5, seed=1)
    assert (len(train), len(test)) == (5, 5)
    assert sorted(train + test) == items
    train, test = split(list(range(11)), 0.5, seed=1)
    assert (len(train), len(test)) == (5, 6)
    assert split(items, 0.5, 7) == split(items, 0.5, 7)
    with pytest.raises(ValueError):
        split(items, 1.0, 0)


def test_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"seed": 4, "length": 9, "ratio": 2}')
    cfg = SimConfig.from_file(path, restarts=3)
    assert (cfg.seed, cfg.length, cfg.restarts, cfg.ratio) == (4, 9, 3, 2)
    with pytest.raises(ValueError):
        SimConfig(seed=0, length=-1)

import random
import warnings
from pathlib import Path

import pytest

from vslam.core import Demonstration, FluentUniverse, GroundAction, GroundModel, successor
from vslam.pddl import ground, load_domain, load_problem

DATA = Path(__file__).resolve().parents[1] / "src" / "vslam" / "data"


def pq():
    """Universe {p, q} used by most hand-worked examples."""
    return FluentUniverse(["p", "q"])


def random_model(rng: random.Random, n: int, k: int, identifiable: bool = False) -> GroundModel:
    """Random conflict-free STRIPS model with ``k`` actions over ``n`` fluents.

    ``identifiable`` forces every precondition literal to be negated by the
    effect, the case in which the effect version space can shrink to a point.
    """
    u = FluentUniverse([f"f{i}" for i in range(n)])
    actions = []
    for j in range(k):
        pre = eff = 0
        for i in range(n):
            c = rng.randrange(3)
            if c:
                pre |= 1 << (2 * i + (c - 1))
            if identifiable and c:
                eff |= 1 << (2 * i + (2 - c))
                continue
            e = rng.randrange(3)
            if e:
                eff |= 1 << (2 * i + (e - 1))
        actions.append(GroundAction(f"a{j}", pre, eff))
    return GroundModel(u, actions)


def exhaustive_demos(model: GroundModel) -> list[Demonstration]:
    """Every transition plus every failing (state, action) pair."""
    out = []
    for s in model.universe.states():
        for a in model.actions:
            if a.pre & ~s == 0:
                out.append(Demonstration(s, a.name, successor(s, a.eff)))
            else:
                out.append(Demonstration(s, a.name, None))
    return out


def random_stream(rng: random.Random, model: GroundModel, length: int) -> list[Demonstration]:
    pool = exhaustive_demos(model)
    return [rng.choice(pool) for _ in range(length)]


@pytest.fixture
def universe_pq():
    return pq()


@pytest.fixture(scope="session")
def blocksworld4():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ground(load_domain(DATA / "blocksworld.pddl"), load_problem(DATA / "bw-4.pddl"))


@pytest.fixture(scope="session")
def blocksworld3():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return ground(load_domain(DATA / "blocksworld.pddl"), load_problem(DATA / "bw-3.pddl"))


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    if report.when == "call" or report.failed:
        if _ACCEPTANCE.get(name) != "FAIL":
            _ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance")
    for name, outcome in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{outcome}  {name}")

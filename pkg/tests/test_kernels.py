import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vslam import _pykernels
from vslam.oracle import uup_reference

try:
    from vslam import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python")]
BACKENDS.append(
    pytest.param(_ckernels, id="cython", marks=pytest.mark.skipif(_ckernels is None, reason="extension not built"))
)


def brute_minimal(sets):
    sets = set(sets)
    return {c for c in sets if not any(o != c and o & ~c == 0 for o in sets)}


def random_case(rng, nbits):
    """An antichain below a random lower bound, and a random state."""
    n = nbits // 2
    lower = rng.getrandbits(nbits)
    raw = [rng.getrandbits(nbits) & lower & rng.getrandbits(nbits) for _ in range(rng.randint(1, 40))]
    upper = sorted(brute_minimal(raw))
    s = 0
    for i in range(n):
        s |= 1 << (2 * i + rng.randrange(2))
    return upper, lower, s


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("nbits", [4, 8, 16, 64, 130, 400])
def test_uup_matches_reference(backend, nbits):
    rng = random.Random(nbits)
    for _ in range(300):
        upper, lower, s = random_case(rng, nbits)
        got = backend.uup_update(upper, lower, s)
        assert len(got) == len(set(got))
        assert set(got) == uup_reference(upper, lower, s)


@pytest.mark.parametrize("backend", BACKENDS)
def test_uup_large_upper(backend):
    # big enough to take the compiled path
    rng = random.Random(3)
    nbits = 24
    for _ in range(20):
        lower = (1 << nbits) - 1
        raw = [rng.getrandbits(nbits) & rng.getrandbits(nbits) & rng.getrandbits(nbits) for _ in range(400)]
        upper = sorted(brute_minimal(raw))
        s = sum(1 << (2 * i + rng.randrange(2)) for i in range(nbits // 2))
        assert set(backend.uup_update(upper, lower, s)) == uup_reference(upper, lower, s)


@pytest.mark.parametrize("backend", BACKENDS)
def test_uup_spec_example(backend):
    # universe {p, q}: p=bit0, !p=bit1, q=bit2, !q=bit3
    full, s = 0b1111, 0b0101
    assert sorted(backend.uup_update([0], full, s)) == [0b0010, 0b1000]
    assert backend.uup_update([0], 0b0001, 0b0110) == [0b0001]


@pytest.mark.parametrize("backend", BACKENDS)
def test_uup_lower_inside_state_empties(backend):
    assert backend.uup_update([0], 0b0001, 0b0101) == []


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("nbits", [6, 20, 70])
def test_minimize_matches_bruteforce(backend, nbits):
    rng = random.Random(nbits)
    for _ in range(200):
        sets = [rng.getrandbits(nbits) & rng.getrandbits(nbits) for _ in range(rng.randint(0, 60))]
        sets += sets[: rng.randint(0, 5)]
        got = backend.minimize_antichain(sets)
        assert len(got) == len(set(got))
        assert set(got) == brute_minimal(sets)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=255), max_size=30), st.integers(0, 255), st.integers(0, 15))
def test_uup_property_small(raw, lower, choice):
    upper = sorted(brute_minimal([u & lower for u in raw]) or {0})
    s = sum(1 << (2 * i + (choice >> i & 1)) for i in range(4))
    expected = uup_reference(upper, lower, s)
    assert set(_pykernels.uup_update(upper, lower, s)) == expected
    if _ckernels is not None:
        assert set(_ckernels.uup_update(upper, lower, s)) == expected


def _backend_in_subprocess(**env):
    out = subprocess.run(
        [sys.executable, "-c", "from vslam import kernels; print(kernels.BACKEND)"],
        env={**os.environ, **env},
        capture_output=True,
        text=True,
        check=True,
    )
    return out.stdout.strip()


def test_backend_selection():
    assert _backend_in_subprocess(VSLAM_PURE_PYTHON="1") == "python"
    expected = "python" if _ckernels is None else "cython"
    env = {k: v for k, v in os.environ.items() if k != "VSLAM_PURE_PYTHON"}
    out = subprocess.run(
        [sys.executable, "-c", "from vslam import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == expected

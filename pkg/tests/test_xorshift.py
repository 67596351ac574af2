import numpy as np
import pytest
from hypothesis import given, strategies as st

from ciprng import xorshift
from ciprng.errors import SeedError
from ciprng.xorshift import FALLBACK_SEED, XorShift32, XorshiftState, seed_from_fraction, seed_from_time


def oracle(seed, count):
    # independent uint32 reimplementation; numpy wraps the left shifts for us
    z = np.uint32(seed)
    out = []
    for _ in range(count):
        z = z ^ np.uint32(z << np.uint32(13))
        z = z ^ np.uint32(z >> np.uint32(17))
        z = z ^ np.uint32(z << np.uint32(5))
        out.append(int(z))
    return out


def test_seed_one():
    assert XorshiftState(1).next()[0] == 270369


@pytest.mark.parametrize("seed", [1, 270369, 484088, 0xFFFFFFFF, 0x80000000])
def test_matches_oracle(seed):
    assert XorShift32(seed).words(1000) == oracle(seed, 1000)


@given(st.integers(1, 2**32 - 1))
def test_never_zero(z):
    assert XorshiftState(z).next()[0] != 0


def test_injective_on_sample():
    states = np.random.default_rng(7).choice(2**32 - 1, size=10**5, replace=False) + 1
    images = {XorshiftState(int(z)).next()[0] for z in states}
    assert len(images) == len(states)


def test_determinism():
    assert XorShift32(99).words(500) == XorShift32(99).words(500)
    a, b = XorshiftState(5), XorshiftState(5)
    for _ in range(10):
        va, a = a.next()
        vb, b = b.next()
        assert va == vb


def test_zero_state_rejected():
    with pytest.raises(SeedError):
        XorshiftState(0)
    with pytest.raises(SeedError):
        XorshiftState(2**32)


def test_seed_from_fraction():
    assert seed_from_fraction(484088).z == 484088
    assert seed_from_fraction(0).z == FALLBACK_SEED
    assert seed_from_fraction(17).z != seed_from_fraction(18).z


def test_seed_from_time(monkeypatch):
    monkeypatch.setattr(xorshift.time, "time_ns", lambda: 1237632934_484088_123)
    assert seed_from_time().z == 484088
    monkeypatch.setattr(xorshift.time, "time_ns", lambda: 1237632934_000000_999)
    assert seed_from_time().z == FALLBACK_SEED

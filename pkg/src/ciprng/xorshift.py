"""Marsaglia's 32-bit xorshift with the (13, 17, 5) triple."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import SeedError

MASK32 = 0xFFFFFFFF
# Substituted when the clock fraction happens to be zero.
FALLBACK_SEED = 0x9E3779B9


def xorshift32(z: int) -> int:
    z ^= (z << 13) & MASK32
    z ^= z >> 17
    z ^= (z << 5) & MASK32
    return z


@dataclass(frozen=True)
class XorshiftState:
    """Immutable generator state; :meth:`next` returns a new state."""

    z: int

    def __post_init__(self):
        if not isinstance(self.z, int) or not 0 < self.z <= MASK32:
            raise SeedError(f"xorshift state must be a nonzero 32-bit word, got {self.z!r}")

    def next(self) -> tuple[int, "XorshiftState"]:
        z = xorshift32(self.z)
        return z, XorshiftState(z)


def seed_from_fraction(micros: int) -> XorshiftState:
    z = micros & MASK32
    return XorshiftState(z if z else FALLBACK_SEED)


def seed_from_time() -> XorshiftState:
    """Seed from the microsecond fraction of the wall clock (e.g. 1237632934.484088 -> 484088)."""
    return seed_from_fraction(time.time_ns() // 1000 % 1_000_000)


class XorShift32:
    """Mutable convenience wrapper.  Single owner; not safe to share between threads."""

    def __init__(self, seed: int | XorshiftState):
        self.state = seed if isinstance(seed, XorshiftState) else XorshiftState(seed)

    def __call__(self) -> int:
        value, self.state = self.state.next()
        return value

    def words(self, count: int) -> list[int]:
        return [self() for _ in range(count)]

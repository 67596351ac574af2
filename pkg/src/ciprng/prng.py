"""Chaotic-iteration generators.

:class:`LegacyGenerator` is the (XORshift, XORshift) generator over vectorial
negation: each round flips ``k`` distinct components, ``k`` drawn with
binomial weights.  :class:`CiGenerator` takes any function with a strongly
connected iteration graph and performs ``b`` or ``b + 1`` single-component
iterations per round.

Generators are immutable values.  A round returns the output together with
the advanced generator.  Any object with a ``next() -> (word, state)``
method can serve as the word source, which is how tests script a strategy.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from math import comb
from typing import Sequence

import numpy as np

from .bitcore import BooleanFunction, iterate_G, step_F
from .errors import ContractError
from .graphgen import build_graph, is_strongly_connected
from .markov import sufficient_iterations
from .xorshift import XorshiftState


@dataclass(frozen=True)
class ScriptedWords:
    """A fixed word sequence standing in for the sub-generator."""

    words: tuple[int, ...]
    pos: int = 0

    def next(self) -> tuple[int, "ScriptedWords"]:
        if self.pos >= len(self.words):
            raise ContractError("scripted word source exhausted")
        return self.words[self.pos], ScriptedWords(self.words, self.pos + 1)

    @classmethod
    def for_ci(cls, b: int, n: int, rounds: Sequence[Sequence[int]]) -> "ScriptedWords":
        """Words that make :func:`ci_round` follow the given per-round strategies."""
        words = []
        for strategy in rounds:
            extra = len(strategy) - b
            if extra not in (0, 1):
                raise ContractError(f"a round runs b or b+1 steps, got {len(strategy)} with b={b}")
            words.append(extra)
            words.extend(s - 1 for s in strategy)
        return cls(tuple(words))


@functools.lru_cache(maxsize=256)
def _chaotic(f: BooleanFunction) -> bool:
    return is_strongly_connected(build_graph(f))


def binomial_bounds(n: int) -> list[int]:
    """Cumulative binomial sums: the upper ends of the reallocate partition."""
    total = 0
    bounds = []
    for j in range(n + 1):
        total += comb(n, j)
        bounds.append(total)
    return bounds


def reallocate(k: int, n: int) -> int:
    """Map a uniform k in [0, 2^n) to j in [0, n] with probability C(n, j) / 2^n."""
    if not 0 <= k < (1 << n):
        raise ContractError(f"k={k} outside [0, 2^{n})")
    for j, upper in enumerate(binomial_bounds(n)):
        if k < upper:
            return j
    raise AssertionError("unreachable")


def sample(rng, k: int, n: int) -> tuple[list[int], object]:
    """k distinct components of 1..n in random order (partial Fisher-Yates)."""
    if not 0 <= k <= n:
        raise ContractError(f"cannot pick {k} distinct components out of {n}")
    comps = list(range(1, n + 1))
    for j in range(k):
        word, rng = rng.next()
        pick = j + word % (n - j)
        comps[j], comps[pick] = comps[pick], comps[j]
    return comps[:k], rng


@dataclass(frozen=True)
class LegacyGenerator:
    n: int
    rng: object
    x: int = 0
    f: BooleanFunction | None = None
    strict_paper: bool = False   # draw k modulo 2^n - 1 instead of 2^n

    def __post_init__(self):
        if self.f is None:
            object.__setattr__(self, "f", BooleanFunction.negation(self.n))
        if self.f.n != self.n:
            raise ContractError("function and generator disagree on n")
        if not 0 <= self.x < (1 << self.n):
            raise ContractError(f"x={self.x} outside [0, 2^{self.n})")

    @property
    def modulus(self) -> int:
        return (1 << self.n) - 1 if self.strict_paper else 1 << self.n


def legacy_round(g: LegacyGenerator) -> tuple[int, LegacyGenerator]:
    word, rng = g.rng.next()
    k = reallocate(word % g.modulus, g.n)
    strategy, rng = sample(rng, k, g.n)
    x = iterate_G(g.f, strategy, g.x, k)
    return x, replace(g, rng=rng, x=x)


@dataclass(frozen=True)
class CiGenerator:
    f: BooleanFunction
    b: int
    rng: object
    x: int = 0

    def __post_init__(self):
        if self.b < 1:
            raise ContractError("b must be >= 1")
        if not 0 <= self.x < (1 << self.f.n):
            raise ContractError(f"x={self.x} outside [0, 2^{self.f.n})")
        if not _chaotic(self.f):
            raise ContractError("iteration graph of f is not strongly connected")

    @property
    def n(self) -> int:
        return self.f.n


def ci_round(g: CiGenerator) -> tuple[int, CiGenerator]:
    word, rng = g.rng.next()
    k = g.b + word % 2
    n = g.f.n
    x = g.x
    for _ in range(k):
        word, rng = rng.next()
        x = step_F(g.f, word % n + 1, x)
    return x, replace(g, rng=rng, x=x)


def default_b(f: BooleanFunction, epsilon: float = 0.01, t_max: int = 1000) -> int:
    """Sufficient iteration count of f from configuration 0."""
    profile = sufficient_iterations(f, 0, epsilon, t_max)
    if profile.sufficient_iterations is None:
        raise ContractError(f"no sufficient iteration count for {f.name or 'f'}; pass b explicitly")
    return profile.sufficient_iterations


def outputs(g, rounds: int):
    """The next ``rounds`` output configurations and the advanced generator."""
    if rounds < 0:
        raise ContractError("rounds must be >= 0")
    if isinstance(g.rng, XorshiftState) and rounds > 0:
        from . import _kernels

        images = np.asarray(g.f.images, dtype=np.int64)
        if isinstance(g, CiGenerator):
            out, z, x = _kernels.ci_rounds(images, g.n, g.b, g.rng.z, g.x, rounds)
        else:
            bounds = np.asarray(binomial_bounds(g.n), dtype=np.int64)
            out, z, x = _kernels.legacy_rounds(images, g.n, bounds, g.modulus, g.rng.z, g.x, rounds)
        return out, replace(g, rng=XorshiftState(int(z)), x=int(x))
    step = ci_round if isinstance(g, CiGenerator) else legacy_round
    out = np.empty(rounds, dtype=np.int64)
    for r in range(rounds):
        out[r], g = step(g)
    return out, g


def to_bits(values, n: int) -> np.ndarray:
    """Spell each configuration as n bits, component 1 first."""
    values = np.asarray(values, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1)
    return ((values[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def bitstream(g, rounds: int):
    """``rounds * n`` bits from successive outputs, and the advanced generator."""
    if rounds < 1:
        raise ContractError("rounds must be >= 1")
    values, g = outputs(g, rounds)
    return to_bits(values, g.n), g


def pack_bytes(bits: np.ndarray) -> bytes:
    """Eight stream bits per byte, first bit most significant; the tail is zero-padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def streams(g, count: int, length: int):
    """Cut one long stream into ``count`` consecutive sequences of ``length`` bits."""
    if count < 1 or length < 1:
        raise ContractError("count and length must be positive")
    needed = count * length
    rounds = -(-needed // g.n)
    bits, g = bitstream(g, rounds)
    return [bits[i * length:(i + 1) * length] for i in range(count)], g

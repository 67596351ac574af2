"""Configurations, Boolean maps and single-component chaotic iteration.

Configurations are plain ints in ``[0, 2**n)``.  Components are numbered
``1..n`` and component 1 is the most significant bit, so for ``n = 4`` the
configuration ``0b0100`` has component 2 set.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ContractError

MAX_N = 16


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_N:
        raise ContractError(f"component count must be in [2, {MAX_N}], got {n}")


def _mask(i: int, n: int) -> int:
    if not 1 <= i <= n:
        raise ContractError(f"component index {i} outside [1, {n}]")
    return 1 << (n - i)


def encode(bits: Sequence[int]) -> int:
    """Integer encoding of a bit vector, first component most significant."""
    value = 0
    for b in bits:
        if b not in (0, 1, True, False):
            raise ContractError(f"not a bit: {b!r}")
        value = (value << 1) | int(b)
    return value


def decode(value: int, n: int) -> tuple[int, ...]:
    if not 0 <= value < (1 << n):
        raise ContractError(f"configuration {value} outside [0, 2^{n})")
    return tuple((value >> (n - i)) & 1 for i in range(1, n + 1))


def hamming(x: int, y: int) -> int:
    return bin(x ^ y).count("1")


@dataclass(frozen=True)
class Configuration:
    """A point of B^n.  Mostly useful for display and parsing."""

    n: int
    value: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.value < (1 << self.n):
            raise ContractError(f"configuration {self.value} outside [0, 2^{self.n})")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Configuration":
        return cls(len(bits), encode(bits))

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        """Parse a bit string such as ``"0100"``."""
        return cls.from_bits([int(c) for c in text.strip()])

    @property
    def bits(self) -> tuple[int, ...]:
        return decode(self.value, self.n)

    def __int__(self):
        return self.value

    def __str__(self):
        return format(self.value, f"0{self.n}b")


@dataclass(frozen=True)
class BooleanFunction:
    """A map B^n -> B^n stored as its truth table.

    ``images[v]`` is the integer encoding of ``f(decode(v))``.
    """

    n: int
    images: tuple[int, ...]
    name: str | None = None

    def __post_init__(self):
        _check_n(self.n)
        object.__setattr__(self, "images", tuple(int(v) for v in self.images))
        size = 1 << self.n
        if len(self.images) != size:
            raise ContractError(f"truth table needs {size} images, got {len(self.images)}")
        for v in self.images:
            if not 0 <= v < size:
                raise ContractError(f"image {v} outside [0, {size})")

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __len__(self):
        return len(self.images)

    def component(self, i: int, x: int) -> int:
        """Value of the i-th coordinate function f_i at x."""
        return 1 if self.images[x] & _mask(i, self.n) else 0

    def is_permutation(self) -> bool:
        return len(set(self.images)) == len(self.images)

    @classmethod
    def negation(cls, n: int) -> "BooleanFunction":
        full = (1 << n) - 1
        return cls(n, [full ^ x for x in range(1 << n)], name="neg")

    @classmethod
    def identity(cls, n: int) -> "BooleanFunction":
        return cls(n, range(1 << n), name="id")

    # JSON document: {"n": int, "images": [...], "name": optional str}
    def to_dict(self) -> dict:
        doc = {"n": self.n, "images": list(self.images)}
        if self.name is not None:
            doc["name"] = self.name
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "BooleanFunction":
        try:
            return cls(int(doc["n"]), doc["images"], doc.get("name"))
        except (KeyError, TypeError) as exc:
            raise ContractError(f"malformed function document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "BooleanFunction":
        return cls.from_dict(json.loads(text))


def load_function(path: str | Path) -> BooleanFunction:
    """Read one function document; JSON-lines files yield their first entry."""
    text = Path(path).read_text(encoding="utf-8").strip()
    return BooleanFunction.from_json(text.splitlines()[0] if "\n" in text else text)


def load_functions(path: str | Path) -> list[BooleanFunction]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [BooleanFunction.from_json(line) for line in lines if line.strip()]


BUILTIN_NAMES = ("neg", "a", "b", "c", "d", "e", "f", "g", "h", "i", "fig1_neg", "fig1_f")
TABLE2_NAMES = ("a", "b", "c", "d", "e", "f", "g", "h", "i")


def builtin_function(name: str) -> BooleanFunction:
    """One of the shipped fixtures: ``neg``, ``a``..``i``, ``fig1_neg``, ``fig1_f``."""
    if name not in BUILTIN_NAMES:
        raise ContractError(f"unknown builtin function {name!r}")
    text = resources.files("ciprng.fixtures").joinpath(f"{name}.json").read_text("utf-8")
    return BooleanFunction.from_json(text)


def neighbor(x: int, i: int, n: int) -> int:
    """N(i, x): x with component i complemented."""
    return x ^ _mask(i, n)


def step_F(f: BooleanFunction, s: int, x: int) -> int:
    """One chaotic iteration: component s takes f_s(x), the rest are kept."""
    m = _mask(s, f.n)
    return (x & ~m) | (f.images[x] & m)


@dataclass(frozen=True)
class Strategy:
    """A finite prefix of a strategy, i.e. the component indices to update."""

    terms: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        for t in self.terms:
            if not 1 <= t <= self.n:
                raise ContractError(f"strategy term {t} outside [1, {self.n}]")

    @classmethod
    def parse(cls, text: str, n: int) -> "Strategy":
        return cls([int(t) for t in text.split(",") if t.strip()], n)

    def shift(self, count: int = 1) -> "Strategy":
        return Strategy(self.terms[count:], self.n)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def iterate_G(f: BooleanFunction, strategy: Strategy | Iterable[int], x0: int, k: int) -> int:
    """Apply k chaotic iterations of f driven by the first k strategy terms."""
    return trajectory(f, strategy, x0, k)[-1]


def trajectory(f: BooleanFunction, strategy: Strategy | Iterable[int], x0: int, k: int) -> list[int]:
    """States x^0, x^1, ..., x^k visited by :func:`iterate_G`."""
    terms = list(strategy)[:k]
    if len(terms) < k:
        raise ContractError(f"strategy has {len(terms)} terms, {k} iterations requested")
    if not 0 <= x0 < (1 << f.n):
        raise ContractError(f"configuration {x0} outside [0, 2^{f.n})")
    states = [x0]
    x = x0
    for s in terms:
        x = step_F(f, s, x)
        states.append(x)
    return states

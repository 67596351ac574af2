"""A subset of the NIST SP 800-22 battery and the P_T uniformity meta-test.

Every test takes a 0/1 sequence and returns a p-value in [0, 1] (serial and
cumulative sums return two).  A test whose statistical precondition fails
returns :data:`NOT_APPLICABLE` (a NaN) instead of a p-value.

The ``check`` flag on each test enforces the NIST recommended minimum
lengths and parameter bounds; pass ``check=False`` to evaluate the textbook
ten-bit examples.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, LengthError, ParameterError, SampleSizeError
from .special import erfc, igamc, normal_cdf

NOT_APPLICABLE = math.nan
PT_THRESHOLD = 0.0001


def is_applicable(p: float) -> bool:
    return not math.isnan(p)


def as_bits(bits) -> np.ndarray:
    if isinstance(bits, str):
        arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(bits)
        if arr.ndim != 1:
            raise InputError("bit sequence must be one-dimensional")
        if arr.dtype != np.uint8:
            arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise InputError("bit sequence may only hold 0 and 1")
    return arr.astype(np.uint8, copy=False)


def _need(cond: bool, exc, msg: str) -> None:
    if not cond:
        raise exc(msg)


def monobit(bits, check: bool = True) -> float:
    """Frequency (monobit) test."""
    e = as_bits(bits)
    n = e.size
    _need(n >= (100 if check else 1), LengthError, f"monobit needs >= 100 bits, got {n}")
    s = 2 * int(np.count_nonzero(e)) - n
    return erfc(abs(s) / math.sqrt(2.0 * n))


def block_frequency(bits, M: int = 128, check: bool = True) -> float:
    e = as_bits(bits)
    n_blocks = e.size // M
    _need(M >= 1 and n_blocks >= 1, LengthError, f"need at least one block of {M} bits")
    pi = e[: n_blocks * M].reshape(n_blocks, M).sum(axis=1) / M
    chi2 = 4.0 * M * float(np.sum((pi - 0.5) ** 2))
    return igamc(n_blocks / 2.0, chi2 / 2.0)


def runs(bits, check: bool = True) -> float:
    e = as_bits(bits)
    n = e.size
    _need(n >= (100 if check else 2), LengthError, f"runs needs >= 100 bits, got {n}")
    pi = np.count_nonzero(e) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return NOT_APPLICABLE
    v = 1 + int(np.count_nonzero(e[1:] != e[:-1]))
    num = abs(v - 2.0 * n * pi * (1 - pi))
    return erfc(num / (2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)))


# (block length, category bounds (lowest, highest), category probabilities)
_LONGEST_RUN_TABLES = {
    8: (1, 4, (0.21484375, 0.3671875, 0.23046875, 0.1875)),
    128: (4, 9, (0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847)),
    10000: (10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
}


def longest_run_parameters(n: int) -> int:
    if n < 128:
        raise LengthError(f"longest-run test needs >= 128 bits, got {n}")
    if n < 6272:
        return 8
    if n < 750_000:
        return 128
    return 10000


def longest_runs_per_block(e: np.ndarray, M: int) -> np.ndarray:
    blocks = e[: (e.size // M) * M].reshape(-1, M)
    pos = np.arange(1, M + 1)
    # position of the most recent zero (0 = none yet) in each block
    last_zero = np.maximum.accumulate(np.where(blocks == 0, pos, 0), axis=1)
    return (pos - last_zero).max(axis=1)


def longest_run_of_ones(bits, check: bool = True) -> float:
    e = as_bits(bits)
    M = longest_run_parameters(e.size)
    low, high, probs = _LONGEST_RUN_TABLES[M]
    longest = np.clip(longest_runs_per_block(e, M), low, high) - low
    counts = np.bincount(longest, minlength=len(probs))
    n_blocks = counts.sum()
    expected = n_blocks * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return igamc((len(probs) - 1) / 2.0, chi2 / 2.0)


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


def cumulative_sums(bits, mode: str = "forward", check: bool = True) -> float:
    """Cusum test.  The summation bounds use truncating integer division, as in the NIST reference code."""
    e = as_bits(bits)
    n = e.size
    _need(n >= (100 if check else 1), LengthError, f"cusum needs >= 100 bits, got {n}")
    if mode not in ("forward", "backward"):
        raise ParameterError(f"mode must be forward or backward, got {mode!r}")
    steps = 2 * e.astype(np.int64) - 1
    if mode == "backward":
        steps = steps[::-1]
    z = int(np.abs(np.cumsum(steps)).max())
    root = math.sqrt(n)
    total1 = 0.0
    for k in range(_trunc_div(_trunc_div(-n, z) + 1, 4), _trunc_div(_trunc_div(n, z) - 1, 4) + 1):
        total1 += normal_cdf((4 * k + 1) * z / root) - normal_cdf((4 * k - 1) * z / root)
    total2 = 0.0
    for k in range(_trunc_div(_trunc_div(-n, z) - 3, 4), _trunc_div(_trunc_div(n, z) - 1, 4) + 1):
        total2 += normal_cdf((4 * k + 3) * z / root) - normal_cdf((4 * k + 1) * z / root)
    return min(1.0, max(0.0, 1.0 - total1 + total2))


def pattern_counts(e: np.ndarray, m: int) -> np.ndarray:
    """Counts of the overlapping m-bit patterns, wrapping around the end."""
    if m <= 0:
        return np.zeros(1, dtype=np.int64)
    aug = np.concatenate([e, e[: m - 1]]).astype(np.int64)
    n = e.size
    values = np.zeros(n, dtype=np.int64)
    for j in range(m):
        values = (values << 1) | aug[j : j + n]
    return np.bincount(values, minlength=1 << m)


def _psi2(e: np.ndarray, m: int) -> float:
    if m <= 0:
        return 0.0
    n = e.size
    counts = pattern_counts(e, m).astype(np.float64)
    return float((1 << m) / n * np.sum(counts**2) - n)


def serial(bits, m: int = 10, check: bool = True) -> tuple[float, float]:
    e = as_bits(bits)
    n = e.size
    _need(m >= 2, ParameterError, "serial test needs m >= 2")
    if check:
        _need(n >= 2 and m < int(math.floor(math.log2(n))) - 2, ParameterError,
              f"serial test with m={m} needs floor(log2(n)) - 2 > m, got n={n}")
    psi_m, psi_m1, psi_m2 = _psi2(e, m), _psi2(e, m - 1), _psi2(e, m - 2)
    del1 = psi_m - psi_m1
    del2 = psi_m - 2.0 * psi_m1 + psi_m2
    p1 = igamc(2.0 ** (m - 2), max(del1, 0.0) / 2.0)
    p2 = igamc(2.0 ** (m - 3), max(del2, 0.0) / 2.0)
    return p1, p2


def _phi(e: np.ndarray, m: int) -> float:
    if m == 0:
        return 0.0
    c = pattern_counts(e, m) / e.size
    c = c[c > 0]
    return float(np.sum(c * np.log(c)))


def approximate_entropy(bits, m: int = 10, check: bool = True) -> float:
    e = as_bits(bits)
    n = e.size
    _need(m >= 1, ParameterError, "approximate entropy needs m >= 1")
    if check:
        _need(n >= 2 and m + 1 < math.log2(n), ParameterError,
              f"approximate entropy with m={m} needs m + 1 < log2(n), got n={n}")
    apen = _phi(e, m) - _phi(e, m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return igamc(2.0 ** (m - 1), max(chi2, 0.0) / 2.0)


@dataclass
class PValueSet:
    test: str
    pvalues: list[float]
    sequence_length: int
    sequence_count: int

    def __post_init__(self):
        for p in self.pvalues:
            if is_applicable(p) and not 0.0 <= p <= 1.0:
                raise InputError(f"p-value {p} outside [0, 1]")
        if len(self.pvalues) != self.sequence_count:
            raise InputError("p-value count does not match the sequence count")

    @property
    def applicable(self) -> list[float]:
        return [p for p in self.pvalues if is_applicable(p)]


def pt_meta(pvalues: PValueSet | Sequence[float], min_count: int = 55) -> float:
    """Chi-square uniformity p-value of a p-value collection, 10 equal bins."""
    ps = pvalues.applicable if isinstance(pvalues, PValueSet) else list(pvalues)
    if len(ps) < min_count:
        raise SampleSizeError(f"P_T needs at least {min_count} p-values, got {len(ps)}")
    bins = np.minimum((np.asarray(ps) * 10).astype(int), 9)
    counts = np.bincount(bins, minlength=10)
    expected = len(ps) / 10.0
    chi2 = float(np.sum((counts - expected) ** 2) / expected)
    return igamc(4.5, chi2 / 2.0)


# Row layout of the full battery; None marks a test we do not implement.
NIST_ROWS = (
    ("Frequency (Monobit) Test", "monobit"),
    ("Frequency Test within a Block", "block_frequency"),
    ("Cumulative Sums (Cusum) Test*", "cumulative_sums"),
    ("Runs Test", "runs"),
    ("Test for the Longest Run of Ones in a Block", "longest_run"),
    ("Binary Matrix Rank Test", None),
    ("Discrete Fourier Transform (Spectral) Test", None),
    ("Non-overlapping Template Matching Test*", None),
    ("Overlapping Template Matching Test", None),
    ("Maurer's \"Universal Statistical\" Test", None),
    ("Approximate Entropy Test", "approximate_entropy"),
    ("Random Excursions Test*", None),
    ("Random Excursions Variant Test*", None),
    ("Serial Test* (m=10)", "serial"),
    ("Linear Complexity Test", None),
)


@dataclass(frozen=True)
class BatteryConfig:
    alpha: float = 0.01
    threshold: float = PT_THRESHOLD
    block_length: int = 128
    serial_m: int = 10
    apen_m: int = 10
    workers: int = 1


def evaluate_stream(bits, config: BatteryConfig = BatteryConfig()) -> dict[str, list[float]]:
    """All implemented tests on one sequence; keys follow :data:`NIST_ROWS`."""
    e = as_bits(bits)
    return {
        "monobit": [monobit(e)],
        "block_frequency": [block_frequency(e, config.block_length)],
        "cumulative_sums": [cumulative_sums(e, "forward"), cumulative_sums(e, "backward")],
        "runs": [runs(e)],
        "longest_run": [longest_run_of_ones(e)],
        "approximate_entropy": [approximate_entropy(e, config.apen_m)],
        "serial": list(serial(e, config.serial_m)),
    }


def _evaluate(args):
    return evaluate_stream(*args)


@dataclass
class TestResult:
    __test__ = False  # not a pytest class

    name: str
    key: str | None
    pt: float = NOT_APPLICABLE           # averaged over sub-statistics
    sub_pt: list[float] = field(default_factory=list)
    proportion: list[float] = field(default_factory=list)
    status: str = "absent"               # pass | fail | not-applicable | absent | external

    def to_dict(self) -> dict:
        def clean(v):
            return None if isinstance(v, float) and math.isnan(v) else v
        return {"name": self.name, "key": self.key, "status": self.status, "pt": clean(self.pt),
                "sub_pt": [clean(v) for v in self.sub_pt], "proportion": [clean(v) for v in self.proportion]}



@dataclass
class TestReport:
    __test__ = False

    results: list[TestResult]
    alpha: float
    threshold: float
    sequence_length: int
    sequence_count: int
    pvalues: dict[str, list[list[float]]] = field(default_factory=dict, repr=False)
    timing: float = 0.0

    def __getitem__(self, key: str) -> TestResult:
        for r in self.results:
            if r.key == key or r.name == key:
                return r
        raise KeyError(key)

    @property
    def passed(self) -> int:
        return sum(r.status == "pass" for r in self.results)

    @property
    def evaluated(self) -> int:
        return sum(r.status != "absent" for r in self.results)

    def all_passed(self) -> bool:
        return all(r.status == "pass" for r in self.results if r.status != "absent")

    def merge_external(self, name: str, pt: float) -> None:
        """Fill an unimplemented row with a P_T computed by an external suite."""
        for r in self.results:
            if r.name == name and r.key is None:
                r.pt = pt
                r.sub_pt = [pt]
                r.status = "external-pass" if pt >= self.threshold else "external-fail"
                return
        raise KeyError(f"no open slot named {name!r}")

    def to_dict(self, include_timing: bool = False) -> dict:
        doc = {
            "alpha": self.alpha,
            "threshold": self.threshold,
            "sequence_length": self.sequence_length,
            "sequence_count": self.sequence_count,
            "tests": [r.to_dict() for r in self.results],
            "success": f"{self.passed}/{self.evaluated}",
        }
        if include_timing:
            doc["timing_seconds"] = self.timing
        return doc

    def table(self, include_timing: bool = True) -> str:
        width = max(len(name) for name, _ in NIST_ROWS)
        lines = [f"{'Method':<{width}}  P_T", "-" * (width + 12)]
        for r in self.results:
            if r.status == "absent":
                cell = "--"
            elif math.isnan(r.pt):
                cell = "NaN"
            else:
                cell = f"{r.pt:.5f}"
            flag = {"pass": "", "fail": "  FAIL", "not-applicable": "  n/a"}.get(r.status, "")
            lines.append(f"{r.name:<{width}}  {cell}{flag}")
        lines.append(f"{'Success':<{width}}  {self.passed}/{self.evaluated}")
        if include_timing:
            lines.append(f"{'Computational time':<{width}}  {self.timing:.4f}")
        return "\n".join(lines)


def run_battery(streams: Sequence, config: BatteryConfig = BatteryConfig()) -> TestReport:
    """Run every implemented test over every stream and aggregate P_T per test.

    Tests with several statistics report the mean of their per-statistic P_T.
    Streams for which a test is not applicable are dropped from that test's
    P_T; if fewer than 55 remain the row is marked not applicable.
    """
    if len(streams) == 0:
        raise InputError("no streams to test")
    arrays = [as_bits(s) for s in streams]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise InputError("all streams must have the same length")
    start = time.perf_counter()
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            per_stream = list(pool.map(_evaluate, [(a, config) for a in arrays]))
    else:
        per_stream = [evaluate_stream(a, config) for a in arrays]

    results = []
    collected: dict[str, list[list[float]]] = {}
    for name, key in NIST_ROWS:
        if key is None:
            results.append(TestResult(name, None))
            continue
        columns = list(zip(*(ps[key] for ps in per_stream)))
        collected[key] = [list(c) for c in columns]
        sub_pt, proportion = [], []
        for col in columns:
            pset = PValueSet(key, list(col), length, len(arrays))
            ok = pset.applicable
            proportion.append(sum(p >= config.alpha for p in ok) / len(ok) if ok else NOT_APPLICABLE)
            sub_pt.append(pt_meta(pset) if len(ok) >= 55 else NOT_APPLICABLE)
        if any(math.isnan(v) for v in sub_pt):
            pt, status = NOT_APPLICABLE, "not-applicable"
        else:
            pt = math.fsum(sub_pt) / len(sub_pt)
            status = "pass" if pt >= config.threshold else "fail"
        results.append(TestResult(name, key, pt, sub_pt, proportion, status))
    report = TestReport(results, config.alpha, config.threshold, length, len(arrays), collected)
    report.timing = time.perf_counter() - start
    return report


@dataclass
class RepartitionMatrix:
    n: int
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self) -> str:
        lines = ["x,y,count"]
        size = 1 << self.n
        for x in range(size):
            for y in range(size):
                lines.append(f"{x},{y},{int(self.counts[x, y])}")
        return "\n".join(lines) + "\n"


def repartition(outputs: Sequence[int], n: int) -> RepartitionMatrix:
    """Successor-pair counts: ``counts[x, y]`` = times value x was followed by y."""
    out = np.asarray(outputs, dtype=np.int64)
    if out.size < 2:
        raise InputError("repartition needs at least two outputs")
    size = 1 << n
    if out.min() < 0 or out.max() >= size:
        raise InputError(f"outputs must lie in [0, {size})")
    counts = np.bincount(out[:-1] * size + out[1:], minlength=size * size)
    return RepartitionMatrix(n, counts.reshape(size, size))

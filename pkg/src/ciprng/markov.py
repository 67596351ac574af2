"""Distribution of the chaotic iteration chain under a uniform strategy.

One step picks a component uniformly among ``n`` and applies ``F_f``.  The
chain is represented by its dense ``2^n x 2^n`` transition matrix.

Two deviation measures are provided.  :func:`deviation_rate` is the mean
absolute deviation from the uniform mass ``u = 2^-n``.
:func:`relative_deviation` divides that by ``u``, i.e. it expresses the mean
deviation as a fraction of the uniform mass.  Sufficiency thresholds such as
"within 1% of uniform" are stated on the relative measure: with it the
``[1, 3, 0, 2]`` example first drops below 1% at t = 14.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitcore import BooleanFunction, hamming
from .errors import ContractError

MAX_MARKOV_N = 12
STOCHASTIC_TOL = 1e-12


@dataclass(frozen=True)
class TransitionMatrix:
    n: int
    rows: np.ndarray

    def __post_init__(self):
        self.rows.setflags(write=False)


def transition_matrix(f: BooleanFunction) -> TransitionMatrix:
    n = f.n
    if n > MAX_MARKOV_N:
        raise ContractError(f"dense chain limited to n <= {MAX_MARKOV_N}")
    size = 1 << n
    counts = np.zeros((size, size), dtype=np.int64)
    xs = np.arange(size)
    images = np.asarray(f.images)
    for i in range(1, n + 1):
        m = 1 << (n - i)
        ys = (xs & ~m) | (images & m)
        np.add.at(counts, (xs, ys), 1)
    return TransitionMatrix(n, counts / n)


def reach_distribution(m: TransitionMatrix, start: int, t: int) -> np.ndarray:
    """P^t: the law of x^t when x^0 = start."""
    if t < 0:
        raise ContractError("t must be >= 0")
    p = np.zeros(1 << m.n)
    p[start] = 1.0
    for _ in range(t):
        p = p @ m.rows
    return p


def _check_normalized(p: np.ndarray) -> None:
    total = float(np.sum(p))
    if abs(total - 1.0) > 1e-9:
        raise ContractError(f"probability vector sums to {total}, not 1")


def deviation_rate(p) -> float:
    """Mean absolute deviation from uniform: sum_x |p(x) - 2^-n| / 2^n."""
    p = np.asarray(p, dtype=float)
    _check_normalized(p)
    size = p.size
    return float(np.abs(p - 1.0 / size).sum() / size)


def relative_deviation(p) -> float:
    """:func:`deviation_rate` as a fraction of the uniform mass 2^-n."""
    p = np.asarray(p, dtype=float)
    return deviation_rate(p) * p.size


@dataclass
class DeviationProfile:
    name: str | None
    start: int | None
    epsilon: float
    deviations: np.ndarray          # relative deviation at t = 1..t_max
    floor_deviation: float
    sufficient_iterations: int | None
    converged: bool
    period: int | None = None
    absolute: np.ndarray = field(default=None, repr=False)  # deviation_rate at t = 1..t_max

    @property
    def t_max(self) -> int:
        return len(self.deviations)

    def first_below(self, threshold: float) -> int | None:
        hits = np.nonzero(self.deviations < threshold)[0]
        return int(hits[0]) + 1 if hits.size else None

    def summary(self) -> dict:
        return {
            "function": self.name,
            "start": "worst-case" if self.start is None else self.start,
            "epsilon": self.epsilon,
            "t_max": self.t_max,
            "floor_deviation": self.floor_deviation,
            "sufficient_iterations": self.sufficient_iterations,
            "converged": self.converged,
            "period": self.period,
        }


def _detect_period(history: list[np.ndarray], tol: float, max_period: int = 8) -> int | None:
    last = history[-1]
    for p in range(1, min(max_period, len(history) - 1) + 1):
        if np.abs(last - history[-1 - p]).sum() <= tol:
            return p
    return None


def sufficient_iterations(f: BooleanFunction, start: int | None = 0, epsilon: float = 0.01,
                          t_max: int = 500) -> DeviationProfile:
    """Deviation profile of f from ``start`` (``None`` = worst case over all starts).

    ``floor_deviation`` is the smallest relative deviation over ``1..t_max``
    and ``sufficient_iterations`` the first t whose deviation is within
    ``epsilon`` of it.  The chain is flagged non-convergent when its law is
    still moving at the horizon; a cyclic pattern, such as the parity
    oscillation of vectorial negation, is reported through ``period`` and no
    sufficient count is given in that case.
    """
    if epsilon <= 0 or t_max < 1:
        raise ContractError("need epsilon > 0 and t_max >= 1")
    m = transition_matrix(f)
    size = 1 << f.n
    if start is None:
        dist = np.eye(size)
    else:
        if not 0 <= start < size:
            raise ContractError(f"start {start} outside [0, {size})")
        dist = np.zeros((1, size))
        dist[0, start] = 1.0
    u = 1.0 / size
    absolute = np.empty(t_max)
    tail: list[np.ndarray] = []
    for t in range(t_max):
        dist = dist @ m.rows
        absolute[t] = (np.abs(dist - u).sum(axis=1) / size).max()
        tail.append(dist)
        if len(tail) > 10:
            tail.pop(0)
    relative = absolute * size
    # Converged when one more step moves the law by less than epsilon (L1),
    # the same units as the relative deviation.
    moving = np.abs(tail[-1] - tail[-2]).sum(axis=1).max() if len(tail) > 1 else np.inf
    converged = bool(moving <= epsilon)
    period = None
    if not converged:
        period = _detect_period(tail, epsilon)
    floor = float(relative.min())
    if converged:
        within = np.nonzero(np.abs(relative - floor) <= epsilon)[0]
        suff = int(within[0]) + 1
    else:
        suff = None
    return DeviationProfile(f.name, start, epsilon, relative, floor, suff, converged, period, absolute)


def support_successors(m: TransitionMatrix, support) -> set[int]:
    rows = m.rows
    out = set()
    for x in support:
        out.update(int(y) for y in np.nonzero(rows[x])[0])
    return out


def check_matrix(m: TransitionMatrix) -> None:
    """Assert the structural invariants of a one-step chain."""
    rows = m.rows
    if np.abs(rows.sum(axis=1) - 1).max() > STOCHASTIC_TOL:
        raise ContractError("rows do not sum to 1")
    scaled = rows * m.n
    if np.abs(scaled - np.round(scaled)).max() > 1e-9:
        raise ContractError("entries are not multiples of 1/n")
    for x, y in zip(*np.nonzero(rows)):
        if hamming(int(x), int(y)) > 1:
            raise ContractError(f"transition {x} -> {y} changes more than one bit")

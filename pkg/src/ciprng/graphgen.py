"""Iteration graphs, strong connectivity and generation of chaotic candidates.

An arc ``(x, i)`` of the iteration graph stands for ``x -> N(i, x)`` and is
present exactly when iterating component ``i`` at ``x`` switches that bit.
Steps that leave ``x`` unchanged are not arcs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .bitcore import BooleanFunction, _check_n
from .errors import ContractError
from .xorshift import XorShift32


@dataclass(frozen=True)
class IterationGraph:
    n: int
    arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        _check_n(self.n)
        arcs = frozenset((int(x), int(i)) for x, i in self.arcs)
        size = 1 << self.n
        for x, i in arcs:
            if not 0 <= x < size or not 1 <= i <= self.n:
                raise ContractError(f"bad arc ({x}, {i}) for n={self.n}")
        object.__setattr__(self, "arcs", arcs)

    @property
    def order(self) -> int:
        return 1 << self.n

    def target(self, arc: tuple[int, int]) -> int:
        x, i = arc
        return x ^ (1 << (self.n - i))

    def edges(self) -> set[tuple[int, int]]:
        return {(x, self.target((x, i))) for x, i in self.arcs}

    def successors(self) -> list[list[int]]:
        return _successors(self.n, self.arcs)

    def __len__(self):
        return len(self.arcs)

    @classmethod
    def complete(cls, n: int) -> "IterationGraph":
        """The labelled hypercube, i.e. the graph of vectorial negation."""
        return cls(n, frozenset((x, i) for x in range(1 << n) for i in range(1, n + 1)))


@dataclass(frozen=True)
class Digraph:
    """Unlabelled digraph on vertices ``0..order-1``; used for relabelled copies."""

    order: int
    edges: frozenset

    def successors(self) -> list[list[int]]:
        succ = [[] for _ in range(self.order)]
        for u, v in sorted(self.edges):
            succ[u].append(v)
        return succ


def _successors(n: int, arcs: Iterable[tuple[int, int]]) -> list[list[int]]:
    succ = [[] for _ in range(1 << n)]
    for x, i in sorted(arcs):
        succ[x].append(x ^ (1 << (n - i)))
    return succ


def build_graph(f: BooleanFunction) -> IterationGraph:
    n = f.n
    arcs = []
    for x, y in enumerate(f.images):
        diff = x ^ y
        for i in range(1, n + 1):
            if diff & (1 << (n - i)):
                arcs.append((x, i))
    return IterationGraph(n, frozenset(arcs))


def function_from_graph(g: IterationGraph) -> BooleanFunction:
    images = list(range(g.order))
    for x, i in g.arcs:
        images[x] ^= 1 << (g.n - i)
    return BooleanFunction(g.n, images)


def tarjan_scc(succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Strongly connected components of a digraph given by successor lists.

    Iterative Tarjan; components come out in reverse topological order.
    """
    order = len(succ)
    index = [-1] * order
    low = [0] * order
    on_stack = [False] * order
    stack: list[int] = []
    components = []
    counter = 0
    for root in range(order):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def is_strongly_connected(g: IterationGraph | Digraph) -> bool:
    succ = g.successors()
    if len(succ) < 2:
        return True
    comps = tarjan_scc(succ)
    return len(comps) == 1


class GenerationParams(NamedTuple):
    n: int
    target_rate: float
    max_attempts: int = 1000
    seed: int = 1

    def validate(self):
        _check_n(self.n)
        if not 0 <= self.target_rate < 1:
            raise ContractError(f"target_rate must be in [0, 1), got {self.target_rate}")
        if self.max_attempts < 1:
            raise ContractError("max_attempts must be >= 1")


class GenerationResult(NamedTuple):
    function: BooleanFunction
    achieved_rate: float
    saturated: bool


def generate_scc_function(params: GenerationParams) -> GenerationResult:
    """Remove random arcs from the hypercube while it stays strongly connected.

    A trial picks a present arc uniformly at random and removes it only if
    the remainder is still strongly connected.  The run stops once the
    removed fraction reaches ``target_rate`` or after ``max_attempts``
    consecutive rejected trials.  Arcs that were once rejected can never
    become removable later (removal only shrinks reachability), so the run
    also stops as soon as every remaining arc is known to be critical.
    ``saturated`` is set when the target was not reached.
    """
    params.validate()
    n = params.n
    total = n << n
    rng = XorShift32(params.seed)
    arcs = sorted(IterationGraph.complete(n).arcs)
    present = set(arcs)
    critical: set[tuple[int, int]] = set()
    removed = 0
    failures = 0
    while removed / total < params.target_rate and failures < params.max_attempts:
        if len(critical) == len(arcs):
            break
        pos = rng() % len(arcs)
        arc = arcs[pos]
        if arc in critical:
            failures += 1
            continue
        present.discard(arc)
        if is_strongly_connected(IterationGraph(n, frozenset(present))):
            arcs[pos] = arcs[-1]
            arcs.pop()
            removed += 1
            failures = 0
        else:
            present.add(arc)
            critical.add(arc)
            failures += 1
    achieved = removed / total
    f = function_from_graph(IterationGraph(n, frozenset(present)))
    return GenerationResult(f, achieved, achieved < params.target_rate)


def permute(g: IterationGraph | Digraph, p: Sequence[int]) -> Digraph:
    """Image of g under the vertex bijection ``v -> p[v]``."""
    edges = g.edges() if isinstance(g, IterationGraph) else g.edges
    order = g.order
    if sorted(p) != list(range(order)):
        raise ContractError("p is not a permutation of the vertices")
    return Digraph(order, frozenset((p[u], p[v]) for u, v in edges))


def relabel_function(f: BooleanFunction, positions: Sequence[int], flip: int = 0) -> BooleanFunction:
    """Conjugate f by a hypercube automorphism (bit permutation, then xor).

    ``positions[j]`` is the new component (1-based) of old component ``j+1``.
    The iteration graph of the result is the image of f's graph under the
    same vertex map, so the two are isomorphic.
    """
    n = f.n
    if sorted(positions) != list(range(1, n + 1)):
        raise ContractError("positions must be a permutation of 1..n")

    def phi(x):
        y = 0
        for j, pos in enumerate(positions, start=1):
            if x & (1 << (n - j)):
                y |= 1 << (n - pos)
        return y ^ flip

    inverse = [0] * (1 << n)
    for x in range(1 << n):
        inverse[phi(x)] = x
    return BooleanFunction(n, [phi(f.images[inverse[y]]) for y in range(1 << n)], f.name)


def _as_digraph(g) -> Digraph:
    if isinstance(g, IterationGraph):
        return Digraph(g.order, frozenset(g.edges()))
    return g


def _refine_colors(graphs: list[Digraph]) -> list[list[int]]:
    # Joint colour refinement so colours are comparable across both graphs.
    preds = []
    succs = []
    for g in graphs:
        s = [[] for _ in range(g.order)]
        p = [[] for _ in range(g.order)]
        for u, v in g.edges:
            s[u].append(v)
            p[v].append(u)
        succs.append(s)
        preds.append(p)
    colors = [[0] * g.order for g in graphs]
    n_classes = 1
    while True:
        palette: dict = {}
        new = []
        for gi, g in enumerate(graphs):
            c = colors[gi]
            row = []
            for v in range(g.order):
                sig = (c[v], tuple(sorted(c[w] for w in succs[gi][v])),
                       tuple(sorted(c[w] for w in preds[gi][v])))
                row.append(palette.setdefault(sig, len(palette)))
            new.append(row)
        colors = new
        if len(palette) == n_classes:
            return colors
        n_classes = len(palette)


def are_isomorphic(g1: IterationGraph | Digraph, g2: IterationGraph | Digraph) -> bool:
    """Decide digraph isomorphism, ignoring arc labels.

    Exact backtracking search.  Candidates are restricted by colour
    refinement (which subsumes in/out-degree pruning) and each partial map
    is checked against every already-mapped vertex in both directions.
    """
    a, b = _as_digraph(g1), _as_digraph(g2)
    if a.order != b.order or len(a.edges) != len(b.edges):
        return False
    ca, cb = _refine_colors([a, b])
    if sorted(ca) != sorted(cb):
        return False
    ea, eb = a.edges, b.edges
    adj_a = [set() for _ in range(a.order)]
    for u, v in ea:
        adj_a[u].add(v)
        adj_a[v].add(u)
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(cb):
        by_color.setdefault(c, []).append(v)

    # Visit vertices of a in an order that keeps the mapped set connected.
    order = []
    seen = set()
    class_size = {c: len(vs) for c, vs in by_color.items()}
    remaining = sorted(range(a.order), key=lambda v: (class_size[ca[v]], v))
    for start in remaining:
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(adj_a[v], key=lambda w: (class_size[ca[w]], w)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(u: int, v: int) -> bool:
        for u2, v2 in mapping.items():
            if ((u, u2) in ea) != ((v, v2) in eb):
                return False
            if ((u2, u) in ea) != ((v2, v) in eb):
                return False
        return ((u, u) in ea) == ((v, v) in eb)

    def search(pos: int) -> bool:
        if pos == len(order):
            return True
        u = order[pos]
        for v in by_color[ca[u]]:
            if v in used or not consistent(u, v):
                continue
            mapping[u] = v
            used.add(v)
            if search(pos + 1):
                return True
            del mapping[u]
            used.discard(v)
        return False

    return search(0)


def dedup_functions(fs: Sequence[BooleanFunction]) -> list[BooleanFunction]:
    """One representative per isomorphism class of iteration graphs, first seen wins."""
    if len({f.n for f in fs}) > 1:
        raise ContractError("all functions must share the same component count")
    reps: list[tuple[BooleanFunction, IterationGraph]] = []
    for f in fs:
        g = build_graph(f)
        if not any(are_isomorphic(g, h) for _, h in reps):
            reps.append((f, g))
    return [f for f, _ in reps]


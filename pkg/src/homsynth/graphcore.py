"""Pattern graphs: model, text format, generators, pruning and small invariants.

Vertices are labeled ``1..vertex_count``.  Edges are stored as sorted
``(min, max)`` pairs.  Bitmask helpers use bit ``v - 1`` for vertex ``v``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .errors import CapacityError, FormatError, InputError

VERTEX_INTEGRITY_LIMIT = 16
VERTEX_COVER_LIMIT = 20
AUTOMORPHISM_LIMIT = 9


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..vertex_count``.

    ``origin`` is set on derived graphs (``prune``, ``induced``) and maps each
    vertex ``v`` to ``origin[v - 1]``, its label in the graph it came from.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    origin: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise FormatError("vertex_count must be nonnegative")
        canon = set()
        for u, v in self.edges:
            if u == v:
                raise FormatError(f"self-loop at vertex {u}")
            a, b = min(u, v), max(u, v)
            if a < 1 or b > self.vertex_count:
                raise FormatError(f"edge {{{u},{v}}} has an endpoint out of range 1..{self.vertex_count}")
            if (a, b) in canon:
                raise FormatError(f"duplicate edge {{{a},{b}}}")
            canon.add((a, b))
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        if self.origin is not None and len(self.origin) != self.vertex_count:
            raise FormatError("origin map must have one entry per vertex")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(vertex_count, tuple(edges))

    @property
    def vertices(self) -> range:
        return range(1, self.vertex_count + 1)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return {v: frozenset(s) for v, s in adj.items()}

    @cached_property
    def masks(self) -> tuple[int, ...]:
        """Neighbor bitmask per vertex, indexed ``v - 1``."""
        out = [0] * self.vertex_count
        for u, v in self.edges:
            out[u - 1] |= 1 << (v - 1)
            out[v - 1] |= 1 << (u - 1)
        return tuple(out)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency.get(u, ())

    def original_label(self, v: int) -> int:
        return v if self.origin is None else self.origin[v - 1]

    def components(self, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
        """Connected components of the subgraph induced by ``vertices``, ordered by least vertex."""
        todo = set(self.vertices if vertices is None else vertices)
        out = []
        for start in sorted(todo):
            if start not in todo:
                continue
            comp = {start}
            stack = [start]
            todo.discard(start)
            while stack:
                u = stack.pop()
                for w in self.adjacency[u]:
                    if w in todo:
                        todo.discard(w)
                        comp.add(w)
                        stack.append(w)
            out.append(frozenset(comp))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, relabeled ``1..m`` in increasing label order; ``origin`` maps back."""
        keep = sorted(set(vertices))
        index = {v: i + 1 for i, v in enumerate(keep)}
        edges = tuple((index[u], index[v]) for u, v in self.edges if u in index and v in index)
        return Graph(len(keep), edges, origin=tuple(keep))

    def to_text(self) -> str:
        lines = [f"p {self.vertex_count}"]
        lines += [f"e {u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"Graph(k={self.vertex_count}, edges={list(self.edges)})"


@dataclass(frozen=True)
class GraphInvariants:
    vertex_cover_number: int
    vertex_integrity: int
    automorphism_count: int


# --- generators -----------------------------------------------------------

def path_graph(k: int) -> Graph:
    return Graph(k, tuple((i, i + 1) for i in range(1, k)))


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise FormatError("cycle needs at least 3 vertices")
    return Graph(k, tuple((i, i + 1) for i in range(1, k)) + ((1, k),))


def clique_graph(k: int) -> Graph:
    return Graph(k, tuple(combinations(range(1, k + 1), 2)))


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves}; the center is vertex 1."""
    return Graph(leaves + 1, tuple((1, i) for i in range(2, leaves + 2)))


def dary_tree(d: int, height: int) -> Graph:
    """Full d-ary tree with ``height`` levels, labeled in BFS order (root 1)."""
    if d < 1 or height < 1:
        raise FormatError("dary needs d >= 1 and height >= 1")
    k = height if d == 1 else (d**height - 1) // (d - 1)
    return Graph(k, tuple(((i - 2) // d + 1, i) for i in range(2, k + 1)))


def grid_graph(rows: int, cols: int) -> Graph:
    def idx(i, j):
        return i * cols + j + 1

    edges = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                edges.append((idx(i, j), idx(i, j + 1)))
            if i + 1 < rows:
                edges.append((idx(i, j), idx(i + 1, j)))
    return Graph(rows * cols, tuple(edges))


def empty_graph(k: int) -> Graph:
    return Graph(k, ())


_GENERATORS = {
    "path": (path_graph, 1),
    "cycle": (cycle_graph, 1),
    "clique": (clique_graph, 1),
    "star": (star_graph, 1),
    "empty": (empty_graph, 1),
    "dary": (dary_tree, 2),
    "grid": (grid_graph, 2),
}

_GEN_RE = re.compile(r"^([a-z]+)((?::\d+)+)$")


def parse_generator(expr: str) -> Graph | None:
    m = _GEN_RE.match(expr.strip())
    if not m or m.group(1) not in _GENERATORS:
        return None
    fn, arity = _GENERATORS[m.group(1)]
    args = [int(a) for a in m.group(2)[1:].split(":")]
    if len(args) != arity:
        raise FormatError(f"generator {m.group(1)!r} takes {arity} argument(s), got {len(args)}")
    graph = fn(*args)
    if graph.vertex_count < 1:
        raise FormatError(f"generator {expr!r} yields an empty graph")
    return graph


def parse_graph(text: str) -> Graph:
    """Parse the line format (``p k`` / ``e u v`` / ``#`` comments) or a generator expression.

    Lines may be separated by newlines or `` / ``.
    """
    gen = parse_generator(text)
    if gen is not None:
        return gen
    declared = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    lines = [part for raw in text.splitlines() for part in raw.split(" / ")]
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer field in {raw.strip()!r}") from None
        if parts[0] == "p" and len(nums) == 1:
            if declared is not None:
                raise FormatError(f"line {lineno}: second 'p' line")
            if edges:
                raise FormatError(f"line {lineno}: 'p' line must precede edges")
            if nums[0] < 1:
                raise FormatError(f"line {lineno}: vertex count must be positive")
            declared = nums[0]
        elif parts[0] == "e" and len(nums) == 2:
            u, v = nums
            if u == v:
                raise FormatError(f"line {lineno}: self-loop at vertex {u}")
            if min(u, v) < 1 or (declared is not None and max(u, v) > declared):
                raise FormatError(f"line {lineno}: endpoint out of range in {raw.strip()!r}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise FormatError(f"line {lineno}: duplicate edge {{{key[0]},{key[1]}}} (first on line {seen[key]})")
            seen[key] = lineno
            edges.append(key)
        else:
            raise FormatError(f"line {lineno}: malformed line {raw.strip()!r}")
    if declared is None:
        if not edges:
            raise FormatError("empty graph description")
        declared = max(v for e in edges for v in e)
    return Graph(declared, tuple(edges))


# --- pruning --------------------------------------------------------------

def prune(graph: Graph, iterate: bool = False) -> Graph:
    """Remove every vertex of degree <= 1 (degrees measured in ``graph``).

    The result is relabeled ``1..m``; ``result.origin`` maps back to ``graph``.
    ``iterate=True`` repeats until the minimum degree is at least 2
    (diagnostic only; the circuit construction uses the one-shot version).
    """
    keep = [v for v in graph.vertices if graph.degree(v) >= 2]
    out = graph.induced(keep)
    if iterate and out.vertex_count and any(out.degree(v) <= 1 for v in out.vertices):
        inner = prune(out, iterate=True)
        origin = tuple(out.origin[v - 1] for v in inner.vertices)
        return Graph(inner.vertex_count, inner.edges, origin=origin)
    return out


# --- bitmask helpers ------------------------------------------------------

def mask_components(masks: tuple[int, ...], within: int) -> list[int]:
    """Components (as bitmasks) of the subgraph induced by ``within``, ordered by lowest bit."""
    out = []
    rest = within
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                nxt |= masks[b.bit_length() - 1]
                f ^= b
            nxt &= within & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        rest &= ~comp
    return out


def mask_vertices(mask: int) -> list[int]:
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length())
        mask ^= b
    return out


# --- invariants -----------------------------------------------------------

def vertex_integrity(graph: Graph) -> int:
    """min over S of |S| + (largest component of graph - S), by exhaustive search."""
    k = graph.vertex_count
    if k > VERTEX_INTEGRITY_LIMIT:
        raise CapacityError(f"vertex_integrity is exhaustive; limit is {VERTEX_INTEGRITY_LIMIT} vertices, got {k}")
    if k == 0:
        return 0
    full = (1 << k) - 1
    best = k
    for s in range(1 << k):
        size = s.bit_count()
        if size >= best:
            continue
        comps = mask_components(graph.masks, full & ~s)
        largest = max((c.bit_count() for c in comps), default=0)
        best = min(best, size + largest)
    return best


def vertex_cover_number(graph: Graph) -> int:
    if graph.vertex_count > VERTEX_COVER_LIMIT:
        raise CapacityError(f"vertex_cover_number limit is {VERTEX_COVER_LIMIT} vertices, got {graph.vertex_count}")
    best = graph.vertex_count

    def branch(edges: list[tuple[int, int]], size: int):
        nonlocal best
        if size >= best:
            return
        if not edges:
            best = size
            return
        u, v = edges[0]
        for pick in (u, v):
            branch([e for e in edges if pick not in e], size + 1)

    branch(list(graph.edges), 0)
    return best


def automorphism_count(graph: Graph) -> int:
    """Number of adjacency-preserving permutations (backtracking enumeration)."""
    k = graph.vertex_count
    if k > AUTOMORPHISM_LIMIT:
        raise CapacityError(f"automorphism_count limit is {AUTOMORPHISM_LIMIT} vertices, got {k}")
    adj = graph.adjacency
    image: dict[int, int] = {}
    used: set[int] = set()

    def extend(v: int) -> int:
        if v > k:
            return 1
        total = 0
        for w in graph.vertices:
            if w in used or graph.degree(w) != graph.degree(v):
                continue
            if all((u in adj[v]) == (image[u] in adj[w]) for u in image):
                image[v] = w
                used.add(w)
                total += extend(v + 1)
                del image[v]
                used.discard(w)
        return total

    return extend(1)


def invariants(graph: Graph) -> GraphInvariants:
    return GraphInvariants(
        vertex_cover_number=vertex_cover_number(graph),
        vertex_integrity=vertex_integrity(graph),
        automorphism_count=automorphism_count(graph),
    )


def require_vertex_sets(graph: Graph, parts: Iterable[Iterable[int]]) -> list[frozenset[int]]:
    """Check ``parts`` are pairwise disjoint vertex sets each inducing a connected subgraph."""
    out = [frozenset(p) for p in parts]
    seen: set[int] = set()
    for i, part in enumerate(out):
        if not part:
            raise InputError(f"part {i} is empty")
        if not part <= set(graph.vertices):
            raise InputError(f"part {i} names vertices outside the graph")
        if part & seen:
            raise InputError(f"part {i} overlaps an earlier part on {sorted(part & seen)}")
        if len(graph.components(part)) != 1:
            raise InputError(f"part {i} does not induce a connected subgraph")
        seen |= part
    return out

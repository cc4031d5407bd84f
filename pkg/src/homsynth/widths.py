"""Exact depth-bounded treewidth and length-bounded pathwidth, with certificates.

Tree solver: a separator recursion over connected vertex sets.  For a
component ``D`` hanging below a bag, the bag of ``D``'s subtree root must
contain every neighbor of ``D`` in the parent bag, so a subproblem is fully
described by ``(D, remaining height)``::

    best(D, h) = min over S <= D, S nonempty, of
                 max(|N(D)| + |S|, max over components C of D - S of best(C, h - 1))
    best(D, 1) = |N(D)| + |D|

Path solver: left-to-right search over (introduced set, current bag) with
eager forgetting, for increasing target width.

``brute_force_width`` is an independent oracle that enumerates small rooted
trees and vertex-to-subtree assignments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Any

from .decomp import PathDecomposition, RootedTreeDecomposition
from .errors import CapacityError, InputError
from .graphcore import Graph, mask_components, mask_vertices, prune

TREE_VERTEX_LIMIT = 15
PATH_VERTEX_LIMIT = 10
PATH_DELTA_LIMIT = 4
BRUTE_VERTEX_LIMIT = 6


@dataclass(frozen=True, eq=False)
class WidthCertificate:
    parameter: str  # tw_delta | pw_delta | ptw_delta | ppw_delta
    delta: int
    value: int
    certificate: RootedTreeDecomposition | PathDecomposition
    graph: Graph

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"parameter": self.parameter, "delta": self.delta, "value": self.value}
        if isinstance(self.certificate, PathDecomposition):
            out.update(self.certificate.to_dict())
        else:
            out.update(self.certificate.to_dict())
        out["graph"] = {"vertex_count": self.graph.vertex_count, "edges": [list(e) for e in self.graph.edges]}
        if self.graph.origin is not None:
            out["graph"]["origin"] = list(self.graph.origin)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def _target(graph: Graph, pruned: bool) -> Graph:
    return prune(graph) if pruned else graph


def _check_delta(delta: int):
    if not isinstance(delta, int) or delta < 1:
        raise InputError(f"delta must be a positive integer, got {delta!r}")


# --- tree solver ------------------------------------------------------------

class _TreeSolver:
    def __init__(self, graph: Graph):
        self.masks = graph.masks
        self.full = (1 << graph.vertex_count) - 1
        self.memo: dict[tuple[int, int], tuple[int, int]] = {}

    def boundary(self, mask: int) -> int:
        out = 0
        for v in mask_vertices(mask):
            out |= self.masks[v - 1]
        return out & ~mask

    def solve(self, comp: int, height: int) -> tuple[int, int]:
        """(min max-bag-size, chosen S) for connected ``comp`` with anchors N(comp)."""
        key = (comp, height)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        anchors = self.boundary(comp).bit_count()
        best, choice = anchors + comp.bit_count(), comp
        if height > 1:
            best, choice = self._search(comp, height, anchors, best, choice, allow_empty=False)
        self.memo[key] = (best, choice)
        return best, choice

    def _search(self, comp, height, anchors, best, choice, allow_empty):
        bits = [1 << (v - 1) for v in mask_vertices(comp)]
        for size in range(0 if allow_empty else 1, len(bits)):
            if anchors + size >= best:
                break
            for combo in combinations(bits, size):
                sep = sum(combo)
                val = anchors + size
                for sub in mask_components(self.masks, comp & ~sep):
                    val = max(val, self.solve(sub, height - 1)[0])
                    if val >= best:
                        break
                if val < best:
                    best, choice = val, sep
        return best, choice

    def top(self, height: int) -> tuple[int, int]:
        best, choice = self.full.bit_count(), self.full
        if height > 1:
            allow_empty = len(mask_components(self.masks, self.full)) > 1
            best, choice = self._search(self.full, height, 0, best, choice, allow_empty)
        return best, choice

    def build(self, height: int) -> RootedTreeDecomposition:
        bags: list[frozenset[int]] = []
        parents: list[int | None] = []

        def emit(comp: int, anchors: int, sep: int, h: int, parent: int | None):
            node = len(bags)
            bags.append(frozenset(mask_vertices(anchors | sep)))
            parents.append(parent)
            for sub in mask_components(self.masks, comp & ~sep):
                _, sub_sep = self.solve(sub, h - 1)
                emit(sub, self.boundary(sub), sub_sep, h - 1, node)

        _, sep = self.top(height)
        emit(self.full, 0, sep, height, None)
        return RootedTreeDecomposition.from_lists(bags, parents)


def tw_delta(graph: Graph, delta: int, pruned: bool = False) -> WidthCertificate:
    """Minimum width over tree decompositions of height at most ``delta``."""
    _check_delta(delta)
    target = _target(graph, pruned)
    name = "ptw_delta" if pruned else "tw_delta"
    if target.vertex_count > TREE_VERTEX_LIMIT:
        raise CapacityError(f"tw_delta handles at most {TREE_VERTEX_LIMIT} vertices, got {target.vertex_count}")
    if target.vertex_count == 0:
        return WidthCertificate(name, delta, -1, RootedTreeDecomposition.single_bag(()), target)
    solver = _TreeSolver(target)
    size, _ = solver.top(delta)
    td = solver.build(delta)
    return WidthCertificate(name, delta, size - 1, td, target)


# --- path solver -------------------------------------------------------------

def _path_search(masks: tuple[int, ...], full: int, cap: int, delta: int) -> list[int] | None:
    failed: dict[tuple[int, int], int] = {}

    def dfs(introduced: int, bag: int, left: int) -> list[int] | None:
        if introduced == full:
            return []
        if left == 0:
            return None
        key = (introduced, bag)
        if failed.get(key, -1) >= left:
            return None
        keep = 0
        for v in mask_vertices(bag):
            if masks[v - 1] & ~introduced:
                keep |= 1 << (v - 1)
        room = cap - keep.bit_count()
        rest = mask_vertices(full & ~introduced)
        for size in range(min(room, len(rest)), 0, -1):
            for combo in combinations(rest, size):
                new = sum(1 << (v - 1) for v in combo)
                tail = dfs(introduced | new, keep | new, left - 1)
                if tail is not None:
                    return [keep | new] + tail
        failed[key] = left
        return None

    return dfs(0, 0, delta)


def pw_delta(graph: Graph, delta: int, pruned: bool = False) -> WidthCertificate:
    """Minimum width over path decompositions with at most ``delta`` bags."""
    _check_delta(delta)
    target = _target(graph, pruned)
    name = "ppw_delta" if pruned else "pw_delta"
    k = target.vertex_count
    if k > PATH_VERTEX_LIMIT and delta > PATH_DELTA_LIMIT:
        raise CapacityError(
            f"pw_delta needs at most {PATH_VERTEX_LIMIT} vertices or delta <= {PATH_DELTA_LIMIT}"
        )
    if k == 0:
        return WidthCertificate(name, delta, -1, PathDecomposition((frozenset(),)), target)
    full = (1 << k) - 1
    length = min(delta, k)
    lower = max(-(-k // length) - 1, 1 if target.edges else 0)
    for width in range(lower, k):
        bags = _path_search(target.masks, full, width + 1, length)
        if bags is not None:
            pd = PathDecomposition(tuple(frozenset(mask_vertices(b)) for b in bags))
            return WidthCertificate(name, delta, width, pd, target)
    raise AssertionError("a single bag always works")  # pragma: no cover


# --- brute-force oracle ------------------------------------------------------

def _rooted_trees(max_nodes: int, max_height: int) -> list[list[int | None]]:
    """Pairwise non-isomorphic rooted trees (as parent lists) up to the given size and height."""
    seen = set()
    out = []

    def canon(parents, t):
        kids = [c for c, p in enumerate(parents) if p == t]
        return "(" + "".join(sorted(canon(parents, c) for c in kids)) + ")"

    def grow(parents, depth):
        key = canon(parents, 0)
        if key in seen:
            return
        seen.add(key)
        out.append(list(parents))
        if len(parents) == max_nodes:
            return
        for p in range(len(parents)):
            if depth[p] < max_height:
                grow(parents + [p], depth + [depth[p] + 1])

    grow([None], [1])
    return out


def _connected_node_sets(parents: list[int | None]) -> list[int]:
    m = len(parents)
    adj = [0] * m
    for c, p in enumerate(parents):
        if p is not None:
            adj[c] |= 1 << p
            adj[p] |= 1 << c
    return [s for s in range(1, 1 << m) if len(mask_components(tuple(adj), s)) == 1]


def _assignable(graph: Graph, node_sets: list[int], m: int, cap: int) -> bool:
    verts = list(graph.vertices)
    chosen: dict[int, int] = {}
    load = [0] * m

    def place(i: int) -> bool:
        if i == len(verts):
            return True
        v = verts[i]
        for s in node_sets:
            if any(load[t] >= cap for t in range(m) if s >> t & 1):
                continue
            if any(u in chosen and not chosen[u] & s for u in graph.neighbors(v)):
                continue
            chosen[v] = s
            for t in range(m):
                if s >> t & 1:
                    load[t] += 1
            if place(i + 1):
                return True
            for t in range(m):
                if s >> t & 1:
                    load[t] -= 1
            del chosen[v]
        return False

    return place(0)


def brute_force_width(graph: Graph, delta: int, mode: str = "tree") -> int:
    """Minimum width by exhaustive search over small decompositions (at most 6 vertices)."""
    _check_delta(delta)
    k = graph.vertex_count
    if k > BRUTE_VERTEX_LIMIT:
        raise CapacityError(f"brute_force_width handles at most {BRUTE_VERTEX_LIMIT} vertices, got {k}")
    if k == 0:
        return -1
    if mode == "tree":
        shapes = _rooted_trees(k, delta)
    elif mode == "path":
        shapes = [[None] + list(range(m - 1)) for m in range(1, min(delta, k) + 1)]
    else:
        raise InputError(f"mode must be 'tree' or 'path', got {mode!r}")
    prepared = [(len(p), _connected_node_sets(p)) for p in shapes]
    for width in range(0, k):
        for m, node_sets in prepared:
            if _assignable(graph, node_sets, m, width + 1):
                return width
    return k - 1  # pragma: no cover

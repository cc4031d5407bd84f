"""Rooted tree decompositions, path decompositions and edge representations.

Heights count nodes: a single-node tree has height 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

from .errors import CapacityError, DecompositionError, FormatError
from .graphcore import Graph, prune

Edge = tuple[int, int]

EXHAUSTIVE_REP_LIMIT = 24


@dataclass(frozen=True, eq=False)
class RootedTreeDecomposition:
    root: int
    parent: Mapping[int, int]
    bags: Mapping[int, frozenset[int]]

    def __post_init__(self):
        parent = {int(t): int(p) for t, p in self.parent.items()}
        bags = {int(t): frozenset(b) for t, b in self.bags.items()}
        if set(parent) != set(bags):
            raise DecompositionError("parent and bag maps must cover the same nodes")
        if self.root not in parent or parent[self.root] != self.root:
            raise DecompositionError("root must map to itself")
        for t in parent:
            seen = {t}
            cur = t
            while cur != self.root:
                cur = parent[cur]
                if cur not in parent:
                    raise DecompositionError(f"node {t} has a parent outside the tree")
                if cur in seen:
                    raise DecompositionError(f"parent links of node {t} form a cycle")
                seen.add(cur)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "bags", bags)

    def __eq__(self, other):
        if not isinstance(other, RootedTreeDecomposition):
            return NotImplemented
        return (self.root, self.parent, self.bags) == (other.root, other.parent, other.bags)

    @classmethod
    def single_bag(cls, bag: Iterable[int]) -> "RootedTreeDecomposition":
        return cls(0, {0: 0}, {0: frozenset(bag)})

    @classmethod
    def from_lists(cls, bags: Sequence[Iterable[int]], parents: Sequence[int | None]) -> "RootedTreeDecomposition":
        """Nodes are list indices; the root has parent ``None``."""
        roots = [i for i, p in enumerate(parents) if p is None]
        if len(roots) != 1:
            raise DecompositionError("exactly one node must have parent None")
        parent = {i: (i if p is None else p) for i, p in enumerate(parents)}
        return cls(roots[0], parent, {i: frozenset(b) for i, b in enumerate(bags)})

    @property
    def nodes(self) -> list[int]:
        return sorted(self.parent)

    @cached_property
    def _children(self) -> dict[int, tuple[int, ...]]:
        ch: dict[int, list[int]] = {t: [] for t in self.parent}
        for t, p in self.parent.items():
            if t != self.root:
                ch[p].append(t)
        return {t: tuple(sorted(c)) for t, c in ch.items()}

    def children(self, t: int) -> tuple[int, ...]:
        return self._children[t]

    @cached_property
    def depths(self) -> dict[int, int]:
        out = {self.root: 1}
        for t in self.preorder():
            for c in self.children(t):
                out[c] = out[t] + 1
        return out

    @property
    def height(self) -> int:
        return max(self.depths.values())

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags.values()) - 1

    @property
    def max_bag_size(self) -> int:
        return self.width + 1

    def preorder(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(self.children(t)))
        return out

    def postorder(self) -> list[int]:
        out = []
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            t, done = stack.pop()
            if done:
                out.append(t)
                continue
            stack.append((t, True))
            stack.extend((c, False) for c in reversed(self.children(t)))
        return out

    def cone(self, t: int) -> frozenset[int]:
        """Union of the bags in the subtree rooted at ``t``."""
        out: set[int] = set()
        stack = [t]
        while stack:
            s = stack.pop()
            out |= self.bags[s]
            stack.extend(self.children(s))
        return frozenset(out)

    def neighbors(self, t: int) -> list[int]:
        out = list(self.children(t))
        if t != self.root:
            out.append(self.parent[t])
        return out

    def reroot(self, new_root: int) -> "RootedTreeDecomposition":
        if new_root not in self.parent:
            raise DecompositionError(f"unknown node {new_root}")
        parent = {new_root: new_root}
        stack = [new_root]
        while stack:
            t = stack.pop()
            for s in self.neighbors(t):
                if s not in parent:
                    parent[s] = t
                    stack.append(s)
        return RootedTreeDecomposition(new_root, parent, self.bags)

    def min_height_rooting(self) -> "RootedTreeDecomposition":
        """Re-root at the node minimizing height (ties: smallest id)."""
        best = min(self.nodes, key=lambda t: (self.reroot(t).height, t))
        return self.reroot(best)

    def relabel_vertices(self, mapping: Mapping[int, int] | Sequence[int]) -> "RootedTreeDecomposition":
        get = mapping.__getitem__ if isinstance(mapping, Mapping) else (lambda v: mapping[v - 1])
        return RootedTreeDecomposition(
            self.root, self.parent, {t: frozenset(get(v) for v in b) for t, b in self.bags.items()}
        )

    # serialization

    def to_dict(self, rep: "EdgeRepresentation | None" = None) -> dict[str, Any]:
        out: dict[str, Any] = {
            "root": self.root,
            "nodes": [
                {"id": t, "parent": self.parent[t], "bag": sorted(self.bags[t])} for t in self.preorder()
            ],
        }
        if rep is not None:
            out["rep"] = rep.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RootedTreeDecomposition":
        try:
            nodes = data["nodes"]
            parent = {int(n["id"]): int(n["parent"]) for n in nodes}
            bags = {int(n["id"]): frozenset(int(v) for v in n["bag"]) for n in nodes}
            return cls(int(data["root"]), parent, bags)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed decomposition JSON: {exc}") from None

    def to_dot(self, rep: "EdgeRepresentation | None" = None) -> str:
        lines = ["graph decomposition {", "  node [shape=ellipse];"]
        repped: dict[int, list[Edge]] = {}
        if rep is not None:
            for e, t in rep.rep.items():
                repped.setdefault(t, []).append(e)
        for t in self.preorder():
            label = "{" + ",".join(map(str, sorted(self.bags[t]))) + "}"
            if repped.get(t):
                label += "\\n" + " ".join(f"{u}-{v}" for u, v in sorted(repped[t]))
            lines.append(f'  t{t} [label="{label}"];')
        for t in self.preorder():
            if t != self.root:
                lines.append(f"  t{self.parent[t]} -- t{t};")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))
        if not self.bags:
            raise DecompositionError("a path decomposition needs at least one bag")

    @property
    def length(self) -> int:
        return len(self.bags)

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def intervals(self) -> dict[int, tuple[int, int]]:
        """Index interval ``[l, r]`` (1-based) of the bags containing each vertex.

        Raises if some vertex occupies a non-contiguous set of bags.
        """
        where: dict[int, list[int]] = {}
        for i, bag in enumerate(self.bags, 1):
            for v in bag:
                where.setdefault(v, []).append(i)
        out = {}
        for v, idx in sorted(where.items()):
            if idx[-1] - idx[0] + 1 != len(idx):
                raise DecompositionError(f"vertex {v} occupies non-contiguous bags {idx}")
            out[v] = (idx[0], idx[-1])
        return out

    @classmethod
    def from_intervals(cls, intervals: Mapping[int, tuple[int, int]], length: int) -> "PathDecomposition":
        bags = [set() for _ in range(length)]
        for v, (lo, hi) in intervals.items():
            if not 1 <= lo <= hi <= length:
                raise DecompositionError(f"interval of vertex {v} is not inside [1, {length}]")
            for i in range(lo - 1, hi):
                bags[i].add(v)
        return cls(tuple(frozenset(b) for b in bags))

    def to_tree(self) -> RootedTreeDecomposition:
        """Chain rooted at the first bag; node ``i`` holds bag ``i + 1``."""
        parents = [None] + list(range(self.length - 1))
        return RootedTreeDecomposition.from_lists(self.bags, parents)

    def to_dict(self) -> dict[str, Any]:
        return {"bags": [sorted(b) for b in self.bags]}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "PathDecomposition":
        try:
            return cls(tuple(frozenset(int(v) for v in b) for b in data["bags"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed path decomposition JSON: {exc}") from None


@dataclass(frozen=True, eq=False)
class EdgeRepresentation:
    rep: Mapping[Edge, int]

    def __post_init__(self):
        object.__setattr__(self, "rep", {(min(e), max(e)): int(t) for e, t in self.rep.items()})

    def __eq__(self, other):
        return isinstance(other, EdgeRepresentation) and self.rep == other.rep

    def __getitem__(self, edge: Edge) -> int:
        return self.rep[(min(edge), max(edge))]

    def repped_at(self, t: int) -> list[Edge]:
        return sorted(e for e, s in self.rep.items() if s == t)

    def to_dict(self) -> dict[str, int]:
        return {f"{u}-{v}": t for (u, v), t in sorted(self.rep.items())}

    @classmethod
    def from_dict(cls, data: Mapping[str, int]) -> "EdgeRepresentation":
        try:
            out = {}
            for key, t in data.items():
                u, v = key.split("-")
                out[(int(u), int(v))] = int(t)
            return cls(out)
        except (AttributeError, ValueError) as exc:
            raise FormatError(f"malformed rep map: {exc}") from None


@dataclass
class ValidationReport:
    valid: bool
    height: int
    width: int
    violations: list[str] = field(default_factory=list)


def validate(graph: Graph, td: RootedTreeDecomposition) -> ValidationReport:
    """Check vertex coverage, edge coverage and the subtree condition."""
    violations = []
    holders: dict[int, list[int]] = {v: [] for v in graph.vertices}
    for t in td.nodes:
        for v in td.bags[t]:
            if v not in holders:
                violations.append(f"bag of node {t} names vertex {v} not in the graph")
            else:
                holders[v].append(t)
    for v, nodes in holders.items():
        if not nodes:
            violations.append(f"vertex {v} is in no bag")
            continue
        node_set = set(nodes)
        # Bags holding v form a subtree iff exactly one of them has its parent outside the set.
        tops = [t for t in nodes if t == td.root or td.parent[t] not in node_set]
        if len(tops) != 1:
            violations.append(f"bags containing vertex {v} do not form a subtree (nodes {sorted(nodes)})")
    for u, v in graph.edges:
        if not any(u in td.bags[t] and v in td.bags[t] for t in td.nodes):
            violations.append(f"edge {{{u},{v}}} is in no bag")
    return ValidationReport(not violations, td.height, td.width, violations)


def choose_edge_representation(
    graph: Graph, td: RootedTreeDecomposition, exhaustive: bool = False
) -> EdgeRepresentation:
    """Deepest bag containing both endpoints, ties to the smallest node id.

    ``exhaustive=True`` instead returns a representation of minimum rep-height
    (first in lexicographic order of candidate choices).
    """
    depth = td.depths
    candidates: dict[Edge, list[int]] = {}
    for e in graph.edges:
        holders = [t for t in td.nodes if e[0] in td.bags[t] and e[1] in td.bags[t]]
        if not holders:
            raise DecompositionError(f"edge {{{e[0]},{e[1]}}} is contained in no bag")
        candidates[e] = sorted(holders, key=lambda t: (-depth[t], t))
    if not exhaustive:
        return EdgeRepresentation({e: c[0] for e, c in candidates.items()})
    if graph.edge_count * len(td.nodes) > EXHAUSTIVE_REP_LIMIT:
        raise CapacityError(
            f"exhaustive rep search needs |E|*|nodes| <= {EXHAUSTIVE_REP_LIMIT}, "
            f"got {graph.edge_count * len(td.nodes)}"
        )
    edges = list(candidates)
    best = None
    for choice in product(*(candidates[e] for e in edges)):
        rep = EdgeRepresentation(dict(zip(edges, choice)))
        h = rep_height(td, rep)
        if best is None or h < best[0]:
            best = (h, rep)
    return best[1] if best else EdgeRepresentation({})


def active_nodes(td: RootedTreeDecomposition, rep: EdgeRepresentation) -> set[int]:
    counts = {t: 0 for t in td.nodes}
    for t in rep.rep.values():
        counts[t] += 1
    out = set()
    for t in td.nodes:
        kids = len(td.children(t))
        if counts[t] >= 2 or (counts[t] >= 1 and kids >= 1) or kids >= 2:
            out.add(t)
    return out


def rep_height(td: RootedTreeDecomposition, rep: EdgeRepresentation) -> int:
    """Maximum number of active nodes on a root-to-leaf path."""
    active = active_nodes(td, rep)
    count = {td.root: int(td.root in active)}
    for t in td.preorder():
        for c in td.children(t):
            count[c] = count[t] + int(c in active)
    return max(count.values())


def attach_pendants(
    graph: Graph, td_pruned: RootedTreeDecomposition
) -> tuple[RootedTreeDecomposition, EdgeRepresentation]:
    """Extend a decomposition of ``prune(graph)`` to one of ``graph``.

    ``td_pruned`` uses the pruned graph's labels.  Each degree-1 vertex ``v``
    with neighbor ``u`` gets a leaf bag ``{v, u}`` under the deepest node
    holding ``u`` (ties: smallest id); a component that is a single edge gets
    a leaf bag under the root; an isolated vertex gets a leaf bag ``{v}``
    under the root.
    """
    pruned = prune(graph)
    back = pruned.origin or ()
    for t, bag in td_pruned.bags.items():
        if any(not 1 <= v <= len(back) for v in bag):
            raise DecompositionError(f"bag of node {t} names a vertex outside the pruned graph")
    td = td_pruned.relabel_vertices(back)
    parent = dict(td.parent)
    bags = dict(td.bags)
    depth = dict(td.depths)
    next_id = max(parent) + 1

    def add_leaf(under: int, bag: frozenset[int]):
        nonlocal next_id
        parent[next_id] = under
        bags[next_id] = bag
        depth[next_id] = depth[under] + 1
        next_id += 1

    for v in graph.vertices:
        deg = graph.degree(v)
        if deg == 0:
            add_leaf(td.root, frozenset({v}))
        elif deg == 1:
            (u,) = graph.neighbors(v)
            if graph.degree(u) == 1:
                if v < u:
                    add_leaf(td.root, frozenset({v, u}))
                continue
            holders = [t for t in td.nodes if u in td.bags[t]]
            if not holders:
                raise DecompositionError(f"neighbor {u} of pendant vertex {v} is in no bag")
            anchor = min(holders, key=lambda t: (-depth[t], t))
            add_leaf(anchor, frozenset({v, u}))
    out = RootedTreeDecomposition(td.root, parent, bags)
    return out, choose_edge_representation(graph, out)


def dump_json(td: RootedTreeDecomposition, rep: EdgeRepresentation | None = None, **header) -> str:
    data = dict(header)
    data.update(td.to_dict(rep))
    return json.dumps(data, indent=1) + "\n"

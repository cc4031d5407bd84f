"""Executable pieces of the lower-bound side.

* ``extract_td_from_parse_tree``: bottom-up marking procedure turning a parse
  tree of a ColSub circuit into a decomposition of the pruned pattern.
* ``gate_support_census``: per-gate monomial counts against n^(k-t-1).
* Hom <-> ColSub reductions by substitution, differentiation and scaling.
* Scaling and depth-hierarchy experiments, and the disjoint-subgraph check.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Sequence

from .circuit import (
    Circuit,
    ParseTree,
    count_parse_trees,
    differentiate,
    enumerate_parse_trees,
    expand,
    metrics,
    scale,
    substitute,
)
from .decomp import RootedTreeDecomposition
from .errors import CapacityError, ConsistencyError, InputError, SupportError
from .graphcore import Graph, automorphism_count, dary_tree, prune, require_vertex_sets
from .poly import Var, aux_var, colsub_var, hom_var
from .synth import synth_circuit
from .widths import tw_delta

CENSUS_LIMIT = 10**5
CASCADE_LIMIT = 10**6


# --- extraction ----------------------------------------------------------------

@dataclass
class Extraction:
    decomposition: RootedTreeDecomposition  # labels of prune(H)
    coloring: dict[int, int]  # vertex -> color, the support of the monomial
    gate_bags: dict[int, frozenset[int]]  # mul gate -> bag, labels of H


def _support(circuit: Circuit, graph: Graph, tree: ParseTree) -> dict[int, int]:
    seen_edges = []
    coloring: dict[int, int] = {}
    for leaf in tree.leaves():
        g = circuit.gates[leaf]
        if g.kind == "const":
            continue
        if g.var.kind != "colsub":
            raise SupportError(f"parse tree reads {g.var}, not a colorful edge variable")
        u, v, i, j = g.var.index
        if not graph.has_edge(u, v):
            raise SupportError(f"variable {g.var} names a non-edge")
        seen_edges.append((u, v))
        for x, c in ((u, i), (v, j)):
            if coloring.setdefault(x, c) != c:
                raise SupportError(f"vertex {x} gets two colors in one monomial")
    if sorted(seen_edges) != list(graph.edges):
        raise SupportError("monomial does not contain every edge exactly once")
    return coloring


@lru_cache(maxsize=64)
def _graph_context(graph: Graph):
    incident = {v: frozenset(e for e in graph.edges if v in e) for v in graph.vertices}
    pruned = prune(graph)
    to_pruned = {orig: i + 1 for i, orig in enumerate(pruned.origin or ())}
    return incident, to_pruned


def extract(circuit: Circuit, graph: Graph, tree: ParseTree) -> Extraction:
    coloring = _support(circuit, graph, tree)
    incident, to_pruned = _graph_context(graph)
    bags: list[frozenset[int]] = []
    kids_of: list[list[int]] = []
    gate_bags: dict[int, frozenset[int]] = {}

    def walk(node: ParseTree):
        """Returns (unmarked vertices, edges multiplied, decomposition node or None)."""
        g = circuit.gates[node.gate]
        if g.kind == "const":
            return None
        if g.kind == "input":
            u, v = g.var.index[:2]
            unmarked = frozenset(x for x in (u, v) if graph.degree(x) != 1)
            return unmarked, {(u, v)}, None
        parts = [r for r in (walk(c) for c in node.children) if r is not None]
        edges = set().union(*(p[1] for p in parts)) if parts else set()
        bag = frozenset().union(*(p[0] for p in parts)) if parts else frozenset()
        marked = {x for x in bag if incident[x] <= edges}
        idx = len(bags)
        bags.append(bag)
        kids_of.append([p[2] for p in parts if p[2] is not None])
        gate_bags[node.gate] = bag
        return bag - marked, edges, idx

    top = walk(tree)
    if top is None or top[2] is None:
        td = RootedTreeDecomposition.single_bag(())
    else:
        parents: list[int | None] = [None] * len(bags)
        for p, kids in enumerate(kids_of):
            for c in kids:
                parents[c] = p
        td = RootedTreeDecomposition.from_lists([{to_pruned[v] for v in b} for b in bags], parents)
    return Extraction(td, coloring, gate_bags)


def extract_td_from_parse_tree(graph: Graph, circuit: Circuit, tree: ParseTree) -> RootedTreeDecomposition:
    """Decomposition of prune(graph), in its labels, read off one parse tree."""
    return extract(circuit, graph, tree).decomposition


# --- census ----------------------------------------------------------------------

@dataclass
class CensusRow:
    gate: int
    kind: str
    monomials: int
    bag_size: int | None
    bound: int | None

    @property
    def ok(self) -> bool:
        return self.bound is None or self.monomials <= self.bound


@dataclass
class CensusReport:
    n: int
    k: int
    parse_trees: int
    rows: list[CensusRow]

    @property
    def violations(self) -> list[CensusRow]:
        return [r for r in self.rows if not r.ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "k": self.k,
            "parse_trees": self.parse_trees,
            "violations": len(self.violations),
            "rows": [dict(r.__dict__, ok=r.ok) for r in self.rows],
        }


def gate_support_census(circuit: Circuit, graph: Graph, n: int) -> CensusReport:
    total = count_parse_trees(circuit)
    if total > CENSUS_LIMIT:
        raise CapacityError(f"{total} parse trees exceed the census limit {CENSUS_LIMIT}")
    k = graph.vertex_count
    through: dict[int, set[tuple[int, ...]]] = {}
    bag_size: dict[int, int] = {}
    for tree in enumerate_parse_trees(circuit):
        ex = extract(circuit, graph, tree)
        key = tuple(ex.coloring.get(v, 0) for v in graph.vertices)
        for gid in tree.gates():
            through.setdefault(gid, set()).add(key)
        for gid, bag in ex.gate_bags.items():
            bag_size[gid] = max(bag_size.get(gid, 0), len(bag))
    rows = []
    for gid in sorted(through):
        size = bag_size.get(gid)
        bound = n ** (k - size) if size else None
        rows.append(CensusRow(gid, circuit.gates[gid].kind, len(through[gid]), size, bound))
    return CensusReport(n, k, total, rows)


# --- reductions ------------------------------------------------------------------

def reduce_colsub_to_hom(circuit: Circuit, graph: Graph, diagonal: str = "keep") -> Circuit:
    """Replace x[e=u-v][i,j] by x[i,j]; with ``diagonal='zero'`` by 0 when i = j."""
    if diagonal not in ("keep", "zero"):
        raise InputError(f"diagonal must be keep or zero, got {diagonal!r}")

    def rule(var: Var):
        if var.kind != "colsub":
            raise InputError(f"expected colorful edge variables, found {var}")
        u, v, i, j = var.index
        if not graph.has_edge(u, v):
            raise InputError(f"variable {var} names a non-edge")
        if diagonal == "zero" and i == j:
            return 0
        return hom_var(i, j)

    return substitute(circuit, rule)


def blown_up_index(a: int, n: int) -> tuple[int, int]:
    """Index a in [k*n] as the pair (vertex, color)."""
    return (a - 1) // n + 1, (a - 1) % n + 1


def blown_up_label(u: int, p: int, n: int) -> int:
    return (u - 1) * n + p


def reduce_hom_to_colsub(circuit: Circuit, graph: Graph, n: int) -> Circuit:
    """From a circuit for Hom over [k*n] to one for ColSub over [n].

    Substitute x[(u,p),(v,q)] by x[e=u-v][p,q] * y[u-v] (0 for non-edges),
    take the derivative in every y, set y to 0, divide by |aut(H)|.
    """
    aut = automorphism_count(graph)

    def lift(var: Var):
        if var.kind != "hom":
            raise InputError(f"expected homomorphism variables, found {var}")
        (u, p), (v, q) = (blown_up_index(a, n) for a in var.index)
        if u == v or not graph.has_edge(u, v):
            return 0
        return (colsub_var(u, v, p, q), aux_var(u, v))

    out = substitute(circuit, lift)
    for u, v in graph.edges:
        out = differentiate(out, aux_var(u, v))
        if len(out) > CASCADE_LIMIT:
            raise CapacityError(f"derivative cascade reached {len(out)} gates")
    out = substitute(out, lambda var: 0 if var.kind == "aux" else var)
    out = scale(out, Fraction(1, aut))
    if count_parse_trees(out) <= CASCADE_LIMIT:
        bad = [c for _, c in expand(out) if Fraction(c).denominator != 1]
        if bad:
            raise ConsistencyError(f"coefficient {bad[0]} is not integral after dividing by |aut(H)| = {aut}")
    return out


# --- experiments -----------------------------------------------------------------

@dataclass
class ScalingReport:
    graph: str
    delta: int
    kind: str
    width: int  # max bag size of the certificate after pendant attachment
    rows: list[dict[str, int]]
    slope: float
    tolerance: float = 0.15

    @property
    def ok(self) -> bool:
        return abs(self.slope - self.width) <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "graph": self.graph,
            "delta": self.delta,
            "kind": self.kind,
            "w": self.width,
            "slope": round(self.slope, 6),
            "tolerance": self.tolerance,
            "ok": self.ok,
            "rows": self.rows,
        }

    def to_text(self) -> str:
        lines = [f"# scaling {self.graph} delta={self.delta} kind={self.kind} w={self.width}"]
        lines.append(f"{'n':>6} {'gates':>10} {'add+mul':>10}")
        for r in self.rows:
            lines.append(f"{r['n']:>6} {r['gate_count']:>10} {r['internal_gates']:>10}")
        lines.append(f"slope {self.slope:.4f} (target {self.width} +- {self.tolerance}): {'ok' if self.ok else 'off'}")
        return "\n".join(lines) + "\n"


def fit_slope(ns: Sequence[int], sizes: Sequence[int]) -> float:
    fit = statistics.linear_regression([math.log(n) for n in ns], [math.log(s) for s in sizes])
    return fit.slope


def scaling_experiment(
    graph: Graph, delta: int, kind: str, n_list: Sequence[int], gate_cap: int | None = None, name: str = ""
) -> ScalingReport:
    """Gate counts over ``n_list`` and the least-squares exponent of log(size) vs log(n)."""
    ns = list(n_list)
    if len(ns) < 3 or ns != sorted(set(ns)):
        raise InputError("n_list needs at least three ascending distinct values")
    rows = []
    width = 0
    for n in ns:
        c, plan = synth_circuit(graph, n, delta, kind, gate_cap)
        width = plan.max_bag
        internal = sum(1 for g in c.gates if g.kind in ("add", "mul"))
        rows.append({"n": n, "gate_count": len(c), "internal_gates": internal})
    slope = fit_slope(ns, [r["gate_count"] for r in rows])
    return ScalingReport(name or repr(graph), delta, kind, width, rows, slope)


@dataclass
class HierarchyReport:
    d: int
    delta: int
    vertices: int
    ptw_upper: int  # ptw at delta + 1
    ptw_lower: int  # ptw at delta
    rows: list[dict[str, int]]
    certificates: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "delta": self.delta,
            "vertices": self.vertices,
            f"ptw_{self.delta + 1}": self.ptw_upper,
            f"ptw_{self.delta}": self.ptw_lower,
            "rows": self.rows,
            "certificates": self.certificates,
        }

    def to_text(self) -> str:
        lines = [
            f"# full {self.d}-ary tree of height {self.delta + 2} ({self.vertices} vertices)",
            f"# product depth {self.delta + 1} admits size about n^{self.ptw_upper + 1} per node;",
            f"# product depth {self.delta} needs size on the order of n^{self.ptw_lower + 1}.",
            f"ptw_{self.delta + 1} = {self.ptw_upper}   ptw_{self.delta} = {self.ptw_lower}",
            f"{'n':>6} {'size':>10} {'product_depth':>14} {'n^(ptw+1)':>12}",
        ]
        for r in self.rows:
            lines.append(f"{r['n']:>6} {r['size']:>10} {r['product_depth']:>14} {r['lower_bound']:>12}")
        return "\n".join(lines) + "\n"


def hierarchy_report(d: int, delta: int, n_list: Iterable[int], gate_cap: int | None = None) -> HierarchyReport:
    """Parameters and measured sizes for the full d-ary tree of height delta + 2."""
    if d < 2 or delta < 1:
        raise InputError("need d >= 2 and delta >= 1")
    graph = dary_tree(d, delta + 2)
    upper = tw_delta(graph, delta + 1, pruned=True)
    lower = tw_delta(graph, delta, pruned=True)
    rows = []
    for n in n_list:
        c, plan = synth_circuit(graph, n, delta + 1, "colsub", gate_cap)
        m = metrics(c)
        rows.append(
            {
                "n": n,
                "size": m.size,
                "product_depth": m.product_depth,
                "nodes": len(plan.decomposition.nodes),
                "lower_bound": n ** (lower.value + 1),
            }
        )
    return HierarchyReport(
        d,
        delta,
        graph.vertex_count,
        upper.value,
        lower.value,
        rows,
        {"upper": upper.to_dict(), "lower": lower.to_dict()},
    )


@dataclass
class LemmaVerdict:
    d: int
    delta: int
    part_widths: list[int | None]  # None means the bound is vacuous (delta - 1 = 0)
    premise: bool
    whole_width: int
    conclusion: bool

    @property
    def holds(self) -> bool:
        return not self.premise or self.conclusion

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__, holds=self.holds)


def check_subgraph_lemma(graph: Graph, parts: Iterable[Iterable[int]], delta: int) -> LemmaVerdict:
    """If each part has tw_(delta-1) >= d-1, the whole graph must have tw_delta >= d-1."""
    sets = require_vertex_sets(graph, parts)
    d = len(sets)
    if d == 0:
        raise InputError("need at least one part")
    widths: list[int | None] = []
    for s in sets:
        if delta - 1 < 1:
            widths.append(None)
        else:
            widths.append(tw_delta(graph.induced(sorted(s)), delta - 1).value)
    premise = all(w is None or w >= d - 1 for w in widths)
    whole = tw_delta(graph, delta).value
    return LemmaVerdict(d, delta, widths, premise, whole, whole >= d - 1)

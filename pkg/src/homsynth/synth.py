"""Compile a pattern graph into a monotone circuit or ABP.

The circuit follows the bag-by-bag recursion: for a node ``p`` and an
assignment ``h`` of its bag,

    Restr[p, h] = prod(edges repped at p under h)
                  * prod over children t of sum(Restr[t, h'] for h' agreeing with h)

and the output sums ``Restr[root, h]`` over all ``h``.  Only active nodes
produce product gates, so the product depth is at most the rep-height.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from itertools import product
from typing import Any

from .circuit import ABP, Circuit, CircuitBuilder, metrics
from .decomp import (
    EdgeRepresentation,
    RootedTreeDecomposition,
    attach_pendants,
    choose_edge_representation,
    rep_height,
    validate,
)
from .errors import CapacityError, ConsistencyError, DecompositionError, DegreeError, InputError
from .graphcore import Graph, prune
from .poly import Var, colsub_var, hom_var
from .widths import WidthCertificate, pw_delta, tw_delta

DEFAULT_GATE_CAP = 10**7
KINDS = ("hom", "colsub")


def default_gate_cap() -> int:
    raw = os.environ.get("HOMSYNTH_GATE_CAP")
    if raw is None:
        return DEFAULT_GATE_CAP
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"HOMSYNTH_GATE_CAP must be an integer, got {raw!r}") from None


def edge_var(kind: str, u: int, v: int, i: int, j: int) -> Var:
    """Variable read by edge uv when u is mapped to i and v to j."""
    if kind == "hom":
        return hom_var(i, j)
    return colsub_var(u, v, i, j)


def _check(kind: str, n: int):
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True, eq=False)
class SynthPlan:
    decomposition: RootedTreeDecomposition
    rep: EdgeRepresentation
    kind: str
    n: int
    delta: int | None
    max_bag: int
    rep_height: int
    predicted_size_bound: int
    certificate: WidthCertificate | None = None

    def report(self, circuit: Circuit | None = None) -> dict[str, Any]:
        out: dict[str, Any] = {
            "kind": self.kind,
            "n": self.n,
            "delta": self.delta,
            "width": self.certificate.value if self.certificate else self.max_bag - 1,
            "max_bag": self.max_bag,
            "rep_height": self.rep_height,
            "predicted_size_bound": self.predicted_size_bound,
            "nodes": len(self.decomposition.nodes),
            "decomposition": self.decomposition.to_dict(self.rep),
        }
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if circuit is not None:
            m = metrics(circuit)
            out["actual_size"] = m.size
            out["product_depth"] = m.product_depth
        return out

    def to_json(self, circuit: Circuit | None = None) -> str:
        return json.dumps(self.report(circuit), indent=1, sort_keys=True) + "\n"


def _assignments(bag: tuple[int, ...], n: int):
    return product(range(1, n + 1), repeat=len(bag))


def build_restr_circuit(
    graph: Graph, td: RootedTreeDecomposition, rep: EdgeRepresentation, n: int, kind: str
) -> Circuit:
    b = CircuitBuilder()
    order = td.postorder()
    bags = {t: tuple(sorted(td.bags[t])) for t in td.nodes}
    repped = {t: rep.repped_at(t) for t in td.nodes}
    restr: dict[int, dict[tuple[int, ...], int]] = {}
    for p in order:
        bag = bags[p]
        pos = {v: i for i, v in enumerate(bag)}
        kids = td.children(p)
        # sums over child assignments, keyed by the values on the shared vertices
        shared = {}
        sums: dict[tuple[int, tuple[int, ...]], int] = {}
        for t in kids:
            common = tuple(v for v in bags[t] if v in pos)
            shared[t] = common
            groups: dict[tuple[int, ...], list[int]] = {}
            tpos = {v: i for i, v in enumerate(bags[t])}
            for h2, gid in restr[t].items():
                key = tuple(h2[tpos[v]] for v in common)
                groups.setdefault(key, []).append(gid)
            for key, members in groups.items():
                sums[(t, key)] = b.sum_gate(members)
        table: dict[tuple[int, ...], int] = {}
        for h in _assignments(bag, n):
            factors = [b.input(edge_var(kind, u, v, h[pos[u]], h[pos[v]])) for u, v in repped[p]]
            for t in kids:
                key = tuple(h[pos[v]] for v in shared[t])
                factors.append(sums[(t, key)])
            table[h] = b.mul(factors)
        restr[p] = table
        del sums
        for t in kids:
            del restr[t]
    return b.build(b.add(restr[td.root].values()))


def synth_from_decomposition(
    graph: Graph,
    td: RootedTreeDecomposition,
    n: int,
    kind: str,
    rep: EdgeRepresentation | None = None,
    delta: int | None = None,
    gate_cap: int | None = None,
    certificate: WidthCertificate | None = None,
) -> tuple[Circuit, SynthPlan]:
    """Circuit for a given decomposition of ``graph`` itself."""
    _check(kind, n)
    report = validate(graph, td)
    if not report.valid:
        raise DecompositionError("; ".join(report.violations))
    if rep is None:
        rep = choose_edge_representation(graph, td)
    for (u, v), t in rep.rep.items():
        if not {u, v} <= td.bags[t]:
            raise DecompositionError(f"edge {u}-{v} is repped at node {t} whose bag misses it")
    w = td.max_bag_size
    plan = SynthPlan(
        decomposition=td,
        rep=rep,
        kind=kind,
        n=n,
        delta=delta,
        max_bag=w,
        rep_height=rep_height(td, rep),
        predicted_size_bound=len(td.nodes) * n**w,
        certificate=certificate,
    )
    cap = default_gate_cap() if gate_cap is None else gate_cap
    if plan.predicted_size_bound > cap:
        raise CapacityError(
            f"predicted size {plan.predicted_size_bound} exceeds the gate cap {cap} "
            f"(max bag {w}, {len(td.nodes)} nodes)"
        )
    circuit = build_restr_circuit(graph, td, rep, n, kind)
    if len(circuit) > cap:
        raise CapacityError(f"circuit has {len(circuit)} gates, over the gate cap {cap}")
    return circuit, plan


def synth_circuit(
    graph: Graph, n: int, delta: int, kind: str, gate_cap: int | None = None
) -> tuple[Circuit, SynthPlan]:
    """Monotone circuit of product depth at most ``delta`` for Hom or ColSub."""
    _check(kind, n)
    cert = tw_delta(graph, delta, pruned=True)
    td, rep = attach_pendants(graph, cert.certificate)
    circuit, plan = synth_from_decomposition(graph, td, n, kind, rep, delta, gate_cap, cert)
    if plan.rep_height > delta:
        raise ConsistencyError(f"rep-height {plan.rep_height} exceeds delta {delta}")
    return circuit, plan


# --- ABPs -------------------------------------------------------------------

def synth_abp(graph: Graph, n: int, delta: int, kind: str) -> tuple[ABP, WidthCertificate]:
    """Monotone ABP of length |E(H)| <= ``delta`` from a path decomposition of the pruned graph.

    Every s-t path reads one variable per edge.  Bags without any edge to
    read are skipped; pendant edges and single-edge components become
    bundles of parallel edges.
    """
    _check(kind, n)
    m = graph.edge_count
    if delta < m:
        raise DegreeError(f"length {delta} < degree {m}")
    pruned = prune(graph)
    back = pruned.origin or ()
    cert = pw_delta(graph, max(1, min(delta, pruned.vertex_count)), pruned=True)
    bags = [frozenset(back[v - 1] for v in bag) for bag in cert.certificate.bags]
    core = set(back)

    # Each item: (bag index, edge, mode) with mode core | pendant | solo.
    items: list[tuple[int, tuple[int, int], str]] = []
    for u, v in graph.edges:
        if u in core and v in core:
            i = min(i for i, bag in enumerate(bags) if u in bag and v in bag)
            items.append((i, (u, v), "core"))
        elif u in core or v in core:
            anchor = u if u in core else v
            i = min(i for i, bag in enumerate(bags) if anchor in bag)
            items.append((i, (u, v), "pendant"))
        else:
            items.append((0, (u, v), "solo"))
    items.sort()
    isolated = sum(1 for v in graph.vertices if graph.degree(v) == 0)
    repeat = n**isolated

    if not items:
        return ABP(2, 0, 1, ((0, 1, n**graph.vertex_count),)), cert

    edges: list[tuple[int, int, object]] = []
    source = 0
    count = 1
    layer: dict[tuple[int, ...], int] = {(): source}
    prev_bag: tuple[int, ...] = ()
    last = len(items) - 1
    sink_id = None
    pending: list[tuple[int, tuple[int, ...], list]] = []

    for step, (bi, (u, v), mode) in enumerate(items):
        bag = tuple(sorted(bags[bi]))
        pos = {x: k for k, x in enumerate(bag)}
        prev_pos = {x: k for k, x in enumerate(prev_bag)}
        shared = [x for x in bag if x in prev_pos]
        targets: dict[tuple[int, ...], int] = {}
        for h_prev, node in layer.items():
            fixed = {x: h_prev[prev_pos[x]] for x in shared}
            free = [x for x in bag if x not in fixed]
            for vals in product(range(1, n + 1), repeat=len(free)):
                full = dict(fixed)
                full.update(zip(free, vals))
                h = tuple(full[x] for x in bag)
                if mode == "core":
                    labels = [edge_var(kind, u, v, full[u], full[v])]
                elif mode == "pendant":
                    if u in pos:
                        labels = [edge_var(kind, u, v, full[u], c) for c in range(1, n + 1)]
                    else:
                        labels = [edge_var(kind, u, v, c, full[v]) for c in range(1, n + 1)]
                else:
                    labels = [edge_var(kind, u, v, a, c) for a in range(1, n + 1) for c in range(1, n + 1)]
                if step == 0:
                    labels = labels * repeat
                pending.append((node, h, labels))
                targets.setdefault(h, -1)
        # allocate next-layer nodes in a fixed order
        if step == last:
            sink_id = count
            count += 1
            for node, h, labels in pending:
                for lbl in labels:
                    edges.append((node, sink_id, lbl))
        else:
            for h in sorted(targets):
                targets[h] = count
                count += 1
            for node, h, labels in pending:
                for lbl in labels:
                    edges.append((node, targets[h], lbl))
        pending = []
        layer = targets
        prev_bag = bag
    return ABP(count, source, sink_id, tuple(edges)), cert

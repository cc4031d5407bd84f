"""Arithmetic circuits, algebraic branching programs and parse trees.

Gates are stored in topological order (children before parents) and a gate
id is its index.  The builder flattens nested gates of the same kind, so add
and mul gates alternate on every path without inserting trivial gates.
Constants are leaves: a mul gate is skew when at most one child is an
add or mul gate.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Any, Callable, Iterator, Mapping, NamedTuple, Union

from .errors import CapacityError, ConsistencyError, EvaluationError, FormatError, InputError
from .poly import (
    MERSENNE_61,
    Number,
    SparsePolynomial,
    Var,
    normalize_number,
    parse_number,
    parse_var,
    to_field,
)

EXPAND_LIMIT = 10**6
PARSE_TREE_LIMIT = 10**6

LEAF_KINDS = ("input", "const")


class Gate(NamedTuple):
    kind: str  # input | const | add | mul
    children: tuple[int, ...] = ()
    var: Var | None = None
    const: Number | None = None


@dataclass(frozen=True, eq=False)
class Circuit:
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        if not 0 <= self.output < len(self.gates):
            raise InputError(f"output gate {self.output} does not exist")
        for gid, g in enumerate(self.gates):
            if any(not 0 <= c < gid for c in g.children):
                raise InputError(f"gate {gid} has a child that does not precede it")
            if g.kind in LEAF_KINDS and g.children:
                raise InputError(f"{g.kind} gate {gid} has children")
            if g.kind == "input" and g.var is None:
                raise InputError(f"input gate {gid} has no variable")
            if g.kind == "const" and g.const is None:
                raise InputError(f"const gate {gid} has no value")
            if g.kind not in ("input", "const", "add", "mul"):
                raise InputError(f"gate {gid} has unknown kind {g.kind!r}")

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.output == other.output and self.gates == other.gates

    def __len__(self):
        return len(self.gates)

    def variables(self) -> set[Var]:
        return {g.var for g in self.gates if g.kind == "input"}

    def to_dict(self) -> dict[str, Any]:
        gates = []
        for gid, g in enumerate(self.gates):
            row: dict[str, Any] = {"id": gid, "kind": g.kind, "children": list(g.children)}
            if g.kind == "input":
                row["var"] = str(g.var)
            elif g.kind == "const":
                row["const"] = str(g.const)
            gates.append(row)
        return {"output": self.output, "gates": gates}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=None, separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Circuit":
        try:
            rows = sorted(data["gates"], key=lambda r: r["id"])
            if [r["id"] for r in rows] != list(range(len(rows))):
                raise FormatError("gate ids must be 0..m-1")
            gates = []
            for r in rows:
                kind = r["kind"]
                var = parse_var(r["var"]) if kind == "input" else None
                const = parse_number(r["const"]) if kind == "const" else None
                gates.append(Gate(kind, tuple(int(c) for c in r.get("children", ())), var, const))
            return cls(tuple(gates), int(data["output"]))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed circuit JSON: missing or bad field {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"circuit file is not JSON: {exc}") from None

    def to_dot(self) -> str:
        shapes = {"input": "box", "const": "plaintext", "add": "circle", "mul": "doublecircle"}
        lines = ["digraph circuit {", "  rankdir=BT;"]
        for gid, g in enumerate(self.gates):
            if g.kind == "input":
                label = str(g.var)
            elif g.kind == "const":
                label = str(g.const)
            else:
                label = "+" if g.kind == "add" else "×"
            extra = ", penwidth=2" if gid == self.output else ""
            lines.append(f'  g{gid} [label="{label}", shape={shapes[g.kind]}{extra}];')
        for gid, g in enumerate(self.gates):
            for c in g.children:
                lines.append(f"  g{c} -> g{gid};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class CircuitBuilder:
    """Append-only gate store with light simplification.

    ``add`` and ``mul`` flatten same-kind children, fold constants and
    collapse unary gates; inputs and constants are shared.
    """

    def __init__(self):
        self.gates: list[Gate] = []
        self._inputs: dict[Var, int] = {}
        self._consts: dict[Number, int] = {}

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def input(self, var: Var) -> int:
        gid = self._inputs.get(var)
        if gid is None:
            gid = self._inputs[var] = self._push(Gate("input", var=var))
        return gid

    def const(self, c: Number) -> int:
        c = normalize_number(Fraction(c) if not isinstance(c, (int, Fraction)) else c)
        gid = self._consts.get(c)
        if gid is None:
            gid = self._consts[c] = self._push(Gate("const", const=c))
        return gid

    def const_value(self, gid: int) -> Number | None:
        g = self.gates[gid]
        return g.const if g.kind == "const" else None

    def add(self, children) -> int:
        flat: list[int] = []
        total: Number = 0
        for c in children:
            g = self.gates[c]
            if g.kind == "const":
                total += g.const
            elif g.kind == "add":
                flat.extend(k for k in g.children if self.gates[k].kind != "const")
                total += sum(self.gates[k].const for k in g.children if self.gates[k].kind == "const")
            else:
                flat.append(c)
        if total:
            flat.append(self.const(total))
        if not flat:
            return self.const(0)
        if len(flat) == 1:
            return flat[0]
        return self._push(Gate("add", tuple(flat)))

    def sum_gate(self, children) -> int:
        """Like ``add``, but a lone product child keeps a unary add above it.

        This keeps one product gate per active decomposition node instead of
        merging it into the product of its parent.
        """
        gid = self.add(children)
        if self.gates[gid].kind == "mul":
            return self._push(Gate("add", (gid,)))
        return gid

    def mul(self, children) -> int:
        flat: list[int] = []
        factor: Number = 1
        for c in children:
            g = self.gates[c]
            if g.kind == "const":
                factor *= g.const
            elif g.kind == "mul":
                for k in g.children:
                    if self.gates[k].kind == "const":
                        factor *= self.gates[k].const
                    else:
                        flat.append(k)
            else:
                flat.append(c)
            if factor == 0:
                return self.const(0)
        if factor != 1:
            flat.append(self.const(factor))
        if not flat:
            return self.const(1)
        if len(flat) == 1:
            return flat[0]
        return self._push(Gate("mul", tuple(flat)))

    def build(self, output: int) -> Circuit:
        """Keep only gates reachable from ``output``, preserving order."""
        keep = {output}
        for gid in range(output, -1, -1):
            if gid in keep:
                keep.update(self.gates[gid].children)
        order = sorted(keep)
        new_id = {old: i for i, old in enumerate(order)}
        gates = tuple(
            self.gates[old]._replace(children=tuple(new_id[c] for c in self.gates[old].children))
            for old in order
        )
        return Circuit(gates, new_id[output])


# --- evaluation and metrics ---------------------------------------------------

def evaluate(circuit: Circuit, assignment: Mapping[Var, Number], modulus: int | None = None) -> Number:
    vals: list[Number] = []
    for g in circuit.gates:
        if g.kind == "input":
            if g.var not in assignment:
                raise EvaluationError(f"variable {g.var} is unassigned")
            v = assignment[g.var]
            vals.append(v % modulus if modulus is not None else v)
        elif g.kind == "const":
            vals.append(to_field(g.const, modulus))
        elif g.kind == "add":
            s = sum(vals[c] for c in g.children)
            vals.append(s % modulus if modulus is not None else s)
        else:
            p: Number = 1
            for c in g.children:
                p = p * vals[c]
                if modulus is not None:
                    p %= modulus
            vals.append(p)
    out = vals[circuit.output]
    return out if modulus is not None else normalize_number(out)


@dataclass(frozen=True)
class CircuitMetrics:
    size: int
    depth: int
    product_depth: int
    monotone: bool
    skew: bool
    formal_degree: int

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def metrics(circuit: Circuit) -> CircuitMetrics:
    depth, pdepth, degree = [], [], []
    skew = True
    for g in circuit.gates:
        if g.kind in LEAF_KINDS:
            depth.append(0)
            pdepth.append(0)
            degree.append(1 if g.kind == "input" else 0)
            continue
        depth.append(1 + max(depth[c] for c in g.children))
        pdepth.append(int(g.kind == "mul") + max(pdepth[c] for c in g.children))
        if g.kind == "add":
            degree.append(max(degree[c] for c in g.children))
        else:
            degree.append(sum(degree[c] for c in g.children))
            inner = sum(1 for c in g.children if circuit.gates[c].kind not in LEAF_KINDS)
            skew = skew and inner <= 1
    monotone = all(g.const >= 0 for g in circuit.gates if g.kind == "const")
    o = circuit.output
    return CircuitMetrics(len(circuit.gates), depth[o], pdepth[o], monotone, skew, degree[o])


def _reachable(circuit: Circuit) -> list[bool]:
    seen = [False] * len(circuit.gates)
    seen[circuit.output] = True
    for gid in range(circuit.output, -1, -1):
        if seen[gid]:
            for c in circuit.gates[gid].children:
                seen[c] = True
    return seen


def count_parse_trees(circuit: Circuit) -> int:
    counts: list[int] = []
    for g in circuit.gates:
        if g.kind in LEAF_KINDS:
            counts.append(1)
        elif g.kind == "add":
            counts.append(sum(counts[c] for c in g.children))
        else:
            counts.append(prod(counts[c] for c in g.children))
    return counts[circuit.output]


def expand(circuit: Circuit, limit: int = EXPAND_LIMIT) -> SparsePolynomial:
    """Exact polynomial computed by the circuit."""
    trees = count_parse_trees(circuit)
    if trees > limit:
        raise CapacityError(f"expansion may produce {trees} monomials, limit is {limit}")
    live = _reachable(circuit)
    polys: list[SparsePolynomial | None] = []
    for gid, g in enumerate(circuit.gates):
        if not live[gid]:
            polys.append(None)
        elif g.kind == "input":
            polys.append(SparsePolynomial.variable(g.var))
        elif g.kind == "const":
            polys.append(SparsePolynomial.constant(g.const))
        elif g.kind == "add":
            acc = SparsePolynomial()
            for c in g.children:
                acc = acc + polys[c]
            polys.append(acc)
        else:
            acc = SparsePolynomial.constant(1)
            for c in g.children:
                acc = acc * polys[c]
            polys.append(acc)
    return polys[circuit.output]


# --- parse trees --------------------------------------------------------------

class ParseTree(NamedTuple):
    gate: int  # a mul, input or const gate
    children: tuple["ParseTree", ...] = ()
    via: tuple[int, ...] = ()  # add gates elided above this node, outermost first

    def gates(self) -> Iterator[int]:
        yield from self.via
        yield self.gate
        for c in self.children:
            yield from c.gates()

    def leaves(self) -> Iterator[int]:
        if not self.children:
            yield self.gate
        for c in self.children:
            yield from c.leaves()


def enumerate_parse_trees(circuit: Circuit, limit: int = PARSE_TREE_LIMIT) -> Iterator[ParseTree]:
    """Lazily yield every reduced parse tree once."""
    total = count_parse_trees(circuit)
    if total > limit:
        raise CapacityError(f"circuit has {total} parse trees, limit is {limit}")
    gates = circuit.gates

    def walk(gid: int) -> Iterator[ParseTree]:
        g = gates[gid]
        if g.kind in LEAF_KINDS:
            yield ParseTree(gid)
        elif g.kind == "add":
            for c in g.children:
                for t in walk(c):
                    yield t._replace(via=(gid,) + t.via)
        else:
            yield from (ParseTree(gid, kids) for kids in _product(g.children, 0))

    def _product(children: tuple[int, ...], i: int) -> Iterator[tuple[ParseTree, ...]]:
        if i == len(children):
            yield ()
            return
        for head in walk(children[i]):
            for tail in _product(children, i + 1):
                yield (head,) + tail

    return walk(circuit.output)


def parse_tree_value(circuit: Circuit, tree: ParseTree) -> tuple[Number, tuple[Var, ...]]:
    """(coefficient, sorted monomial) contributed by ``tree``."""
    coeff: Number = 1
    mono = []
    for leaf in tree.leaves():
        g = circuit.gates[leaf]
        if g.kind == "const":
            coeff *= g.const
        else:
            mono.append(g.var)
    return normalize_number(coeff), tuple(sorted(mono))


# --- transformations ---------------------------------------------------------

Image = Union[Var, int, Fraction, tuple]
Rule = Union[Mapping[Var, Image], Callable[[Var], Image]]


def _lookup(rule: Rule, var: Var) -> Image:
    if callable(rule) and not isinstance(rule, Mapping):
        return rule(var)
    if var not in rule:
        raise InputError(f"substitution rule does not cover {var}")
    return rule[var]


def _emit_image(b: CircuitBuilder, image: Image) -> int:
    if isinstance(image, Var):
        return b.input(image)
    if isinstance(image, tuple):
        return b.mul([_emit_image(b, part) for part in image])
    return b.const(image)


def rebuild(circuit: Circuit, leaf: Callable[[CircuitBuilder, Gate], int]) -> Circuit:
    """Copy ``circuit`` through a fresh builder, mapping each leaf with ``leaf``."""
    b = CircuitBuilder()
    new: list[int] = []
    for g in circuit.gates:
        if g.kind in LEAF_KINDS:
            new.append(leaf(b, g))
        elif g.kind == "add":
            new.append(b.add(new[c] for c in g.children))
        else:
            new.append(b.mul(new[c] for c in g.children))
    return b.build(new[circuit.output])


def substitute(circuit: Circuit, rule: Rule) -> Circuit:
    """Replace each input variable by a variable, a constant or a product of these."""

    def leaf(b: CircuitBuilder, g: Gate) -> int:
        if g.kind == "const":
            return b.const(g.const)
        return _emit_image(b, _lookup(rule, g.var))

    return rebuild(circuit, leaf)


def differentiate(circuit: Circuit, var: Var) -> Circuit:
    """Circuit for the partial derivative with respect to ``var``.

    Each gate keeps a pair (value, derivative).  The derivative of a product
    is a sum of products, so the product depth does not grow.
    """
    b = CircuitBuilder()
    zero = b.const(0)
    val: list[int] = []
    der: list[int] = []
    for g in circuit.gates:
        if g.kind == "input":
            val.append(b.input(g.var))
            der.append(b.const(1) if g.var == var else zero)
        elif g.kind == "const":
            val.append(b.const(g.const))
            der.append(zero)
        elif g.kind == "add":
            val.append(b.add(val[c] for c in g.children))
            der.append(b.add(der[c] for c in g.children))
        else:
            kids = g.children
            val.append(b.mul(val[c] for c in kids))
            terms = []
            for i, c in enumerate(kids):
                if b.const_value(der[c]) == 0:
                    continue
                terms.append(b.mul([der[c]] + [val[k] for j, k in enumerate(kids) if j != i]))
            der.append(b.add(terms))
    return b.build(der[circuit.output])


def scale(circuit: Circuit, c: Number) -> Circuit:
    """Multiply the computed polynomial by ``c`` without adding a product layer.

    The constant is pushed into the children of the output sum: mul children
    absorb it as an extra factor, leaf children are repeated when the
    resulting multiplicity is a whole number.
    """
    c = Fraction(c)
    top = circuit.gates[circuit.output]
    groups = Counter(top.children) if top.kind == "add" else Counter({circuit.output: 1})

    b = CircuitBuilder()
    new: list[int] = []
    for g in circuit.gates:
        if g.kind == "input":
            new.append(b.input(g.var))
        elif g.kind == "const":
            new.append(b.const(g.const))
        elif g.kind == "add":
            new.append(b.add(new[k] for k in g.children))
        else:
            new.append(b.mul(new[k] for k in g.children))
    parts: list[int] = []
    for child, mult in sorted(groups.items()):
        weight = c * mult
        g = circuit.gates[child]
        if g.kind == "mul":
            parts.append(b.mul([new[child], b.const(weight)]))
        elif g.kind == "const":
            parts.append(b.const(g.const * weight))
        elif weight.denominator == 1:
            parts.extend([new[child]] * int(weight))
        else:
            raise ConsistencyError(f"input {g.var} would need the fractional multiplicity {weight}")
    return b.build(b.add(parts))


# --- algebraic branching programs -------------------------------------------

Label = Union[Var, int, Fraction]


@dataclass(frozen=True)
class ABP:
    """Layered DAG; nodes 0..node_count-1 are in topological order."""

    node_count: int
    source: int
    sink: int
    edges: tuple[tuple[int, int, Label], ...]

    def __post_init__(self):
        for u, v, _ in self.edges:
            if not (0 <= u < v < self.node_count):
                raise InputError(f"ABP edge {u}->{v} breaks the topological numbering")

    @property
    def size(self) -> int:
        return self.node_count

    def _longest(self) -> list[int]:
        longest = [-1] * self.node_count
        longest[self.source] = 0
        for u, v, _ in sorted(self.edges, key=lambda e: e[0]):
            if longest[u] >= 0:
                longest[v] = max(longest[v], longest[u] + 1)
        return longest

    @property
    def length(self) -> int:
        return self._longest()[self.sink]

    def is_monotone(self) -> bool:
        return all(isinstance(lbl, Var) or lbl >= 0 for _, _, lbl in self.edges)

    def evaluate(self, assignment: Mapping[Var, Number], modulus: int | None = None) -> Number:
        acc: list[Number] = [0] * self.node_count
        acc[self.source] = 1
        for u, v, lbl in sorted(self.edges, key=lambda e: e[0]):
            if isinstance(lbl, Var):
                if lbl not in assignment:
                    raise EvaluationError(f"variable {lbl} is unassigned")
                w = assignment[lbl]
            else:
                w = to_field(lbl, modulus)
            acc[v] += acc[u] * w
            if modulus is not None:
                acc[v] %= modulus
        return normalize_number(acc[self.sink]) if modulus is None else acc[self.sink]

    def to_dict(self) -> dict[str, Any]:
        return {
            "nodes": self.node_count,
            "source": self.source,
            "sink": self.sink,
            "edges": [{"from": u, "to": v, "label": str(lbl)} for u, v, lbl in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ABP":
        try:
            edges = []
            for e in data["edges"]:
                text = str(e["label"])
                lbl = parse_var(text) if text[:1] in "xy" else parse_number(text)
                edges.append((int(e["from"]), int(e["to"]), lbl))
            return cls(int(data["nodes"]), int(data["source"]), int(data["sink"]), tuple(edges))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed ABP JSON: {exc}") from None

    def to_dot(self) -> str:
        lines = ["digraph abp {", "  rankdir=LR;"]
        for v in range(self.node_count):
            shape = "doublecircle" if v in (self.source, self.sink) else "circle"
            lines.append(f'  n{v} [label="{v}", shape={shape}];')
        for u, v, lbl in self.edges:
            lines.append(f'  n{u} -> n{v} [label="{lbl}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def abp_to_circuit(abp: ABP) -> Circuit:
    """Skew circuit: each node sums products of a predecessor with one edge label."""
    b = CircuitBuilder()
    incoming: dict[int, list[tuple[int, Label]]] = {}
    for u, v, lbl in abp.edges:
        incoming.setdefault(v, []).append((u, lbl))
    value: dict[int, int] = {abp.source: b.const(1)}
    for v in range(abp.node_count):
        if v == abp.source:
            continue
        terms = []
        for u, lbl in incoming.get(v, ()):
            if u not in value:
                continue
            leaf = b.input(lbl) if isinstance(lbl, Var) else b.const(lbl)
            terms.append(b.mul([value[u], leaf]))
        value[v] = b.add(terms)
    return b.build(value.get(abp.sink, b.const(0)))

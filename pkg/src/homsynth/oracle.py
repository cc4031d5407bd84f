"""Brute-force ground truth for Hom and ColSub, and a randomized equality test.

Nothing here touches decompositions or the synthesizer: polynomials are
built by enumerating every map V(H) -> [n].  ``contract_evaluate`` is a
second, independent evaluator (vertex elimination over edge tables) for
points where full enumeration is too slow.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Mapping

from .circuit import Circuit, evaluate
from .errors import CapacityError, InputError
from .graphcore import Graph
from .poly import MERSENNE_61, Number, SparsePolynomial, Var, colsub_var, hom_var

POLY_LIMIT = 10**6
EVAL_LIMIT = 10**8
BRUTE_POINT_LIMIT = 10**5
TABLE_LIMIT = 10**6


@dataclass(frozen=True)
class PolySpec:
    graph: Graph
    n: int
    kind: str  # hom | colsub

    def __post_init__(self):
        if self.kind not in ("hom", "colsub"):
            raise InputError(f"kind must be hom or colsub, got {self.kind!r}")
        if self.n < 1:
            raise InputError(f"n must be positive, got {self.n}")

    def var(self, u: int, v: int, i: int, j: int) -> Var:
        return hom_var(i, j) if self.kind == "hom" else colsub_var(u, v, i, j)

    def universe(self) -> list[Var]:
        r = range(1, self.n + 1)
        if self.kind == "hom":
            return [hom_var(i, j) for i in r for j in r if i <= j]
        return [colsub_var(u, v, i, j) for u, v in self.graph.edges for i in r for j in r]

    @property
    def map_count(self) -> int:
        return self.n**self.graph.vertex_count


def _maps(spec: PolySpec):
    return product(range(1, spec.n + 1), repeat=spec.graph.vertex_count)


def brute_polynomial(spec: PolySpec) -> SparsePolynomial:
    if spec.map_count > POLY_LIMIT:
        raise CapacityError(f"{spec.map_count} maps exceed the expansion limit {POLY_LIMIT}")
    out = SparsePolynomial()
    edges = spec.graph.edges
    for f in _maps(spec):
        mono = tuple(sorted(spec.var(u, v, f[u - 1], f[v - 1]) for u, v in edges))
        out.add_term(mono, 1)
    return out


def brute_evaluate(spec: PolySpec, point: Mapping[Var, Number], modulus: int | None = None) -> Number:
    if spec.map_count > EVAL_LIMIT:
        raise CapacityError(f"{spec.map_count} maps exceed the evaluation limit {EVAL_LIMIT}")
    edges = spec.graph.edges
    total: Number = 0
    for f in _maps(spec):
        term: Number = 1
        for u, v in edges:
            term = term * point[spec.var(u, v, f[u - 1], f[v - 1])]
            if modulus is not None:
                term %= modulus
        total += term
    return total % modulus if modulus is not None else total


def contract_evaluate(spec: PolySpec, point: Mapping[Var, Number], modulus: int | None = None) -> Number:
    """Point value by eliminating vertices one at a time (min-degree order)."""
    n = spec.n
    colors = range(1, n + 1)
    # A factor is (scope, table) with table indexed by the colors of the scope.
    factors: list[tuple[tuple[int, ...], dict[tuple[int, ...], Number]]] = []
    for u, v in spec.graph.edges:
        table = {(i, j): point[spec.var(u, v, i, j)] for i in colors for j in colors}
        factors.append(((u, v), table))
    result: Number = 1
    remaining = set(spec.graph.vertices)
    while remaining:
        def cost(x):
            scope = set()
            for s, _ in factors:
                if x in s:
                    scope.update(s)
            return (len(scope), x)

        x = min(remaining, key=cost)
        remaining.discard(x)
        touching = [f for f in factors if x in f[0]]
        factors = [f for f in factors if x not in f[0]]
        scope = tuple(sorted({y for s, _ in touching for y in s} - {x}))
        if n ** (len(scope) + 1) > TABLE_LIMIT:
            raise CapacityError(f"elimination table over {len(scope) + 1} vertices is too large")
        table: dict[tuple[int, ...], Number] = {}
        for vals in product(colors, repeat=len(scope)):
            env = dict(zip(scope, vals))
            acc: Number = 0
            for c in colors:
                env[x] = c
                term: Number = 1
                for s, t in touching:
                    term = term * t[tuple(env[y] for y in s)]
                    if modulus is not None:
                        term %= modulus
                acc += term
            table[vals] = acc % modulus if modulus is not None else acc
        if scope:
            factors.append((scope, table))
        else:
            result = result * table[()]
            if modulus is not None:
                result %= modulus
    return result


def oracle_evaluate(spec: PolySpec, point: Mapping[Var, Number], modulus: int | None = None) -> Number:
    if spec.map_count <= BRUTE_POINT_LIMIT:
        return brute_evaluate(spec, point, modulus)
    return contract_evaluate(spec, point, modulus)


@dataclass
class PitVerdict:
    equal: bool
    trials: int
    seed: int
    point: dict[str, int] | None = None
    circuit_value: int | None = None
    oracle_value: int | None = None
    extra_variables: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.equal

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def random_point(variables, rng: random.Random, modulus: int = MERSENNE_61) -> dict[Var, int]:
    return {v: rng.randrange(modulus) for v in sorted(variables)}


def pit_equal(circuit: Circuit, spec: PolySpec, trials: int = 20, seed: int = 0) -> PitVerdict:
    """Compare ``circuit`` with the target polynomial at random points mod 2^61-1.

    Variables of the circuit outside the target's universe still get random
    values, so a circuit that reads them is caught as a mismatch.
    """
    if trials < 1:
        raise InputError("trials must be positive")
    rng = random.Random(seed)
    universe = set(spec.universe())
    extra = sorted(circuit.variables() - universe)
    names = sorted(universe | set(extra))
    for _ in range(trials):
        point = random_point(names, rng)
        got = evaluate(circuit, point, MERSENNE_61)
        want = oracle_evaluate(spec, point, MERSENNE_61)
        if got != want:
            return PitVerdict(
                False,
                trials,
                seed,
                {str(v): point[v] for v in names},
                got,
                want,
                [str(v) for v in extra],
            )
    return PitVerdict(True, trials, seed, extra_variables=[str(v) for v in extra])

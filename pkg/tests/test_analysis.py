import json
from fractions import Fraction

import pytest

from conftest import PENDANT_CYCLE, corpus_graph
from homsynth.analysis import (
    blown_up_index,
    blown_up_label,
    check_subgraph_lemma,
    extract,
    extract_td_from_parse_tree,
    fit_slope,
    gate_support_census,
    hierarchy_report,
    reduce_colsub_to_hom,
    reduce_hom_to_colsub,
    scaling_experiment,
)
from homsynth.circuit import CircuitBuilder, count_parse_trees, enumerate_parse_trees, expand, metrics
from homsynth.decomp import RootedTreeDecomposition, validate
from homsynth.errors import ConsistencyError, InputError, SupportError
from homsynth.graphcore import dary_tree, parse_graph, prune
from homsynth.oracle import PolySpec, brute_polynomial
from homsynth.poly import colsub_var, hom_var
from homsynth.synth import synth_circuit, synth_from_decomposition

PENDANT_CYCLE_TD = RootedTreeDecomposition.from_lists(
    [{2, 3, 4}, {1, 2, 4}, {2, 3}, {3, 4}, {2, 6}, {4, 5}], [None, 0, 0, 0, 2, 3]
)


def _bag_multiset(td):
    return sorted(sorted(b) for b in td.bags.values())


def test_pendant_cycle_extraction_reproduces_bags():
    g = parse_graph(PENDANT_CYCLE)
    c, _ = synth_from_decomposition(g, PENDANT_CYCLE_TD, 2, "colsub")
    pruned = prune(g)
    back = pruned.origin
    for tree in enumerate_parse_trees(c):
        td = extract_td_from_parse_tree(g, c, tree)
        original = sorted(sorted(back[v - 1] for v in b) for b in td.bags.values())
        assert original == [[1, 2, 4], [2, 3], [2, 3, 4], [3, 4]]
        assert sorted(back[v - 1] for v in td.bags[td.root]) == [2, 3, 4]
        assert validate(pruned, td).valid


@pytest.mark.parametrize("name", ["K2", "P3", "P4", "K3", "C4", "K1,3", "pendant-cycle", "dary:2:3"])
def test_extraction_valid_and_shallow(name):
    g = corpus_graph(name)
    pruned = prune(g)
    for delta in (1, 2, 3):
        c, _ = synth_circuit(g, 2, delta, "colsub")
        depth = metrics(c).product_depth
        for tree in enumerate_parse_trees(c):
            ex = extract(c, g, tree)
            r = validate(pruned, ex.decomposition)
            assert r.valid, r.violations
            assert r.height <= max(depth, 1)
            assert len(ex.coloring) == g.vertex_count - sum(1 for v in g.vertices if g.degree(v) == 0)


def test_extraction_rejects_hom_circuits():
    g = parse_graph("clique:3")
    c, _ = synth_circuit(g, 2, 1, "hom")
    with pytest.raises(SupportError):
        extract(c, g, next(enumerate_parse_trees(c)))


def test_extraction_rejects_two_colors():
    g = parse_graph("path:3")
    b = CircuitBuilder()
    c = b.build(b.mul([b.input(colsub_var(1, 2, 1, 1)), b.input(colsub_var(2, 3, 2, 1))]))
    with pytest.raises(SupportError, match="two colors"):
        extract(c, g, next(enumerate_parse_trees(c)))


def test_extraction_rejects_missing_edge():
    g = parse_graph("path:3")
    b = CircuitBuilder()
    c = b.build(b.mul([b.input(colsub_var(1, 2, 1, 1))]))
    with pytest.raises(SupportError):
        extract(c, g, next(enumerate_parse_trees(c)))


@pytest.mark.parametrize("name", ["K2", "P3", "P4", "K1,3", "K3", "C4", "C6", "K4", "pendant-cycle", "dary:3:2", "dary:2:3"])
def test_parse_tree_count_and_census(name):
    g = corpus_graph(name)
    c, _ = synth_circuit(g, 2, 2, "colsub")
    assert count_parse_trees(c) == 2**g.vertex_count
    report = gate_support_census(c, g, 2)
    assert report.violations == []
    data = json.loads(json.dumps(report.to_dict()))
    assert data["parse_trees"] == 2**g.vertex_count


@pytest.mark.parametrize("name", ["K2", "P3", "K3"])
def test_colsub_to_hom(name):
    g = corpus_graph(name)
    c, _ = synth_circuit(g, 2, 2, "colsub")
    h = reduce_colsub_to_hom(c, g)
    assert expand(h) == brute_polynomial(PolySpec(g, 2, "hom"))
    assert metrics(h).product_depth == metrics(c).product_depth


def test_colsub_to_hom_zero_diagonal_counts_proper_colorings():
    g = parse_graph("clique:3")
    c, _ = synth_circuit(g, 3, 1, "colsub")
    h = reduce_colsub_to_hom(c, g, diagonal="zero")
    ones = {hom_var(i, j): 1 for i in range(1, 4) for j in range(i, 4)}
    assert expand(h).evaluate(ones) == 6
    with pytest.raises(InputError):
        reduce_colsub_to_hom(c, g, diagonal="maybe")


def test_blown_up_indices():
    assert blown_up_index(1, 3) == (1, 1)
    assert blown_up_index(6, 3) == (2, 3)
    assert all(blown_up_index(blown_up_label(u, p, 3), 3) == (u, p) for u in (1, 2) for p in (1, 2, 3))


@pytest.mark.parametrize("name, aut", [("K2", 2), ("K3", 6)])
def test_hom_to_colsub(name, aut):
    g = corpus_graph(name)
    k = g.vertex_count
    c, _ = synth_circuit(g, k * 2, 1, "hom")
    out = reduce_hom_to_colsub(c, g, 2)
    poly = expand(out)
    assert poly == brute_polynomial(PolySpec(g, 2, "colsub"))
    assert all(Fraction(coef).denominator == 1 for _, coef in poly)
    assert metrics(out).product_depth == metrics(c).product_depth


def test_hom_to_colsub_on_wrong_circuit_is_not_integral():
    g = parse_graph("clique:3")
    b = CircuitBuilder()
    c = b.build(
        b.mul([b.input(hom_var(1, 3)), b.input(hom_var(1, 5)), b.input(hom_var(3, 5))])
    )
    with pytest.raises(ConsistencyError):
        reduce_hom_to_colsub(c, g, 2)


def test_fit_slope_exact_power():
    ns = [2, 4, 8, 16]
    assert fit_slope(ns, [5 * n**3 for n in ns]) == pytest.approx(3.0)


def test_scaling_small():
    r = scaling_experiment(parse_graph("clique:3"), 1, "hom", [2, 3, 4], name="K3")
    # n(n+1)/2 inputs, n^3 products, one output sum
    assert r.width == 3 and [row["gate_count"] for row in r.rows] == [n * (n + 1) // 2 + n**3 + 1 for n in (2, 3, 4)]
    assert "slope" in r.to_text() and r.to_dict()["graph"] == "K3"
    with pytest.raises(InputError):
        scaling_experiment(parse_graph("clique:3"), 1, "hom", [4, 2, 3])


def test_hierarchy_binary():
    r = hierarchy_report(2, 1, [2, 3, 4])
    assert (r.vertices, r.ptw_upper, r.ptw_lower) == (7, 1, 2)
    assert [row["size"] for row in r.rows] == [47, 94, 157]
    assert all(row["product_depth"] <= 2 for row in r.rows)
    assert "ptw_2 = 1" in r.to_text()


def test_subgraph_lemma_ternary():
    g = dary_tree(3, 3)
    v = check_subgraph_lemma(g, [[2, 5, 6, 7], [3, 8, 9, 10], [4, 11, 12, 13]], 2)
    assert v.part_widths == [3, 3, 3] and v.premise and v.whole_width == 3 and v.holds


def test_subgraph_lemma_vacuous_at_one():
    v = check_subgraph_lemma(parse_graph("path:4"), [[1, 2], [3, 4]], 1)
    assert v.part_widths == [None, None] and v.holds

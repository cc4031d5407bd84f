import json

import pytest
from hypothesis import given, settings

from homsynth.decomp import choose_edge_representation, rep_height, validate
from homsynth.errors import CapacityError, InputError
from homsynth.graphcore import dary_tree, parse_graph, prune, vertex_cover_number, vertex_integrity
from homsynth.widths import brute_force_width, pw_delta, tw_delta
from strategies import graphs

# tw_1..tw_4, computed with the exhaustive assignment oracle and an independent
# networkx-based enumeration, then frozen
TW = {
    "edge:2": [1, 1, 1, 1],
    "path:3": [2, 1, 1, 1],
    "path:4": [3, 1, 1, 1],
    "star:3": [3, 1, 1, 1],
    "clique:3": [2, 2, 2, 2],
    "cycle:4": [3, 2, 2, 2],
    "cycle:6": [5, 2, 2, 2],
    "clique:4": [3, 3, 3, 3],
    "dary:2:3": [6, 2, 1, 1],
    "dary:3:2": [3, 1, 1, 1],
    "dary:2:4": [14, 3, 2, 1],
    "dary:3:3": [12, 3, 1, 1],
}

PTW = {
    "edge:2": [-1, -1, -1],
    "path:3": [0, 0, 0],
    "path:4": [1, 1, 1],
    "clique:3": [2, 2, 2],
    "cycle:4": [3, 2, 2],
    "cycle:6": [5, 2, 2],
    "dary:2:3": [2, 1, 1],
    "dary:2:4": [6, 2, 1],
    "dary:3:3": [3, 1, 1],
}


def _graph(expr):
    return parse_graph("path:2") if expr == "edge:2" else parse_graph(expr)


@pytest.mark.parametrize("expr", sorted(TW))
def test_tw_frozen(expr):
    g = _graph(expr)
    for delta, want in enumerate(TW[expr], 1):
        cert = tw_delta(g, delta)
        assert cert.value == want
        r = validate(g, cert.certificate)
        assert r.valid and r.height <= delta and r.width == want


@pytest.mark.parametrize("expr", sorted(PTW))
def test_ptw_frozen(expr):
    g = _graph(expr)
    for delta, want in enumerate(PTW[expr], 1):
        cert = tw_delta(g, delta, pruned=True)
        assert cert.value == want and cert.parameter == "ptw_delta"
        assert validate(prune(g), cert.certificate).valid


def test_one_height_is_single_bag():
    assert tw_delta(parse_graph("cycle:5"), 1).value == 4


def test_path_examples():
    assert pw_delta(parse_graph("cycle:4"), 2).value == 2
    assert pw_delta(parse_graph("path:4"), 1).value == 3
    assert pw_delta(parse_graph("path:4"), 3).value == 1
    cert = pw_delta(dary_tree(2, 3), 3, pruned=True)
    assert cert.parameter == "ppw_delta" and cert.value == 1


def test_certificate_json():
    data = json.loads(tw_delta(parse_graph("cycle:4"), 2).to_json())
    assert data["parameter"] == "tw_delta" and data["value"] == 2
    assert data["graph"]["vertex_count"] == 4


def test_bad_delta_and_capacity():
    with pytest.raises(InputError):
        tw_delta(parse_graph("cycle:4"), 0)
    with pytest.raises(CapacityError):
        tw_delta(parse_graph("path:16"), 2)
    with pytest.raises(CapacityError):
        brute_force_width(parse_graph("path:7"), 2)


def test_height_limited_width_of_ternary_subtrees():
    # a separator-based lower bound: removing the root leaves three copies of dary(3,2)+leaves
    g = dary_tree(3, 3)
    assert tw_delta(g, 2).value == 3
    for part in ([2, 5, 6, 7], [3, 8, 9, 10], [4, 11, 12, 13]):
        assert tw_delta(g.induced(part), 1).value == 3


@pytest.mark.parametrize("expr", ["path:5", "cycle:5", "star:4", "path:6", "cycle:6"])
def test_tree_solver_matches_brute_force_sparse(expr):
    g = parse_graph(expr)
    for delta in (1, 2, 3):
        assert tw_delta(g, delta).value == brute_force_width(g, delta, "tree")


@settings(max_examples=40)
@given(graphs(max_vertices=4))
def test_tree_solver_matches_brute_force(g):
    for delta in (1, 2, 3):
        assert tw_delta(g, delta).value == brute_force_width(g, delta, "tree")


@settings(max_examples=40)
@given(graphs(max_vertices=5))
def test_path_solver_matches_brute_force(g):
    for delta in (1, 2, 3):
        assert pw_delta(g, delta).value == brute_force_width(g, delta, "path")


@given(graphs(max_vertices=8))
def test_monotone_in_delta(g):
    values = [tw_delta(g, d).value for d in (1, 2, 3, 4)]
    assert values == sorted(values, reverse=True)
    paths = [pw_delta(g, d).value for d in (1, 2, 3)]
    assert paths == sorted(paths, reverse=True)
    assert all(t <= p for t, p in zip(values, paths))


@given(graphs(max_vertices=8))
def test_two_height_width_bounded_by_cover(g):
    if g.edges:
        assert tw_delta(g, 2).value <= vertex_cover_number(g)


@given(graphs(max_vertices=7, connected=True))
def test_integrity_minus_one_at_most_cover(g):
    assert vertex_integrity(g) - 1 <= vertex_cover_number(g)


@given(graphs(max_vertices=7))
def test_two_height_width_below_integrity(g):
    # the exact relation is tw_2 + 1 = min over S of max(|S|, max_C |C u N(C)|), which is <= vi
    assert tw_delta(g, 2).value + 1 <= vertex_integrity(g)


@given(graphs(max_vertices=8))
def test_pruned_certificate_gives_shallow_representation(g):
    from homsynth.decomp import attach_pendants

    for delta in (1, 2, 3):
        cert = tw_delta(g, delta, pruned=True)
        td, rep = attach_pendants(g, cert.certificate)
        assert rep_height(td, rep) <= delta
        assert td.max_bag_size - 1 <= max(cert.value, 1)


@given(graphs(max_vertices=7))
def test_certificate_representation_within_delta(g):
    cert = tw_delta(g, 2)
    rep = choose_edge_representation(g, cert.certificate)
    assert rep_height(cert.certificate, rep) <= 2

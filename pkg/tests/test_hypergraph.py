import random

import pytest
from hypothesis import given, strategies as st

from softdecomp import Hypergraph, HypergraphError, parse_hypergraph
from softdecomp.hypergraph import ids_of, mask_of, popcount

from conftest import random_connected_hypergraph


def test_mask_helpers_roundtrip():
    assert mask_of([0, 3, 5]) == 0b101001
    assert ids_of(0b101001) == (0, 3, 5)
    assert popcount(0b101001) == 3
    assert ids_of(0) == ()


def test_parse_and_serialize_roundtrip():
    text = "r(a,b),\ns(b,c) % trailing comment\nt(c,a)\n"
    h = parse_hypergraph(text)
    assert h.vertex_names == ("a", "b", "c")
    assert h.edge_names == ("r", "s", "t")
    again = parse_hypergraph(h.serialize())
    assert again == h


def test_parse_rejects_garbage():
    with pytest.raises(HypergraphError):
        parse_hypergraph("r(a,b) junk s(b,c)")
    with pytest.raises(HypergraphError):
        parse_hypergraph("r(a,b), r(b,c)")  # duplicate edge name
    with pytest.raises(HypergraphError):
        parse_hypergraph("r()")
    with pytest.raises(HypergraphError):
        parse_hypergraph("   ")


def test_isolated_vertices_rejected_unless_wrapped():
    with pytest.raises(HypergraphError):
        Hypergraph.from_named_edges([("r", ["a"])], extra_vertices=["z"])
    h = Hypergraph.from_named_edges(
        [("r", ["a"])], allow_isolated=True, extra_vertices=["z"]
    )
    assert h.n_edges == 2 and "z" in h.vertex_names


def test_duplicate_vertex_sets_allowed():
    h = parse_hypergraph("r(a,b), s(a,b)")
    assert h.duplicate_scheme_ids == (1,)


def _path(n):
    return Hypergraph.from_named_edges(
        [(f"e{i}", [f"v{i}", f"v{i+1}"]) for i in range(n - 1)]
    )


def test_components_of_path_split_by_middle_vertex():
    h = _path(5)  # v0-v1-v2-v3-v4
    sep = mask_of([h.vertex_id("v2")])
    comps = h.edge_components(sep)
    assert len(comps) == 2
    # the separator vertex is pulled into both unions by the touching edges
    left, right = comps
    assert ids_of(left.vertices) == tuple(h.vertex_id(v) for v in ("v0", "v1", "v2"))
    assert h.vertex_id("v2") in ids_of(right.vertices)


def test_edges_inside_separator_belong_to_no_component():
    h = parse_hypergraph("r(a,b), s(b,c), t(c,d)")
    sep = mask_of([h.vertex_id("b"), h.vertex_id("c")])
    comps = h.edge_components(sep)
    covered = [e for c in comps for e in c.edge_ids]
    assert h.edge_id("s") not in covered
    assert sorted(covered) == [h.edge_id("r"), h.edge_id("t")]


def test_full_separator_leaves_nothing():
    h = parse_hypergraph("r(a,b), s(b,c)")
    assert h.edge_components(h.all_vertices_mask) == []
    assert len(h.edge_components(0)) == 1  # connected


@given(st.integers(0, 10_000), st.integers(0, 255))
def test_component_unions_match_edge_components(seed, sep_bits):
    h = random_connected_hypergraph(random.Random(seed))
    sep = sep_bits & h.all_vertices_mask
    want = [c.vertices for c in h.edge_components(sep)]
    assert h.component_unions(sep) == want


@given(st.integers(0, 10_000), st.integers(0, 255))
def test_components_partition_free_vertices(seed, sep_bits):
    h = random_connected_hypergraph(random.Random(seed))
    sep = sep_bits & h.all_vertices_mask
    comps = h.vertex_components(sep)
    union = 0
    for c in comps:
        assert c and not (c & sep)
        assert not (c & union)  # pairwise disjoint
        union |= c
    assert union == h.all_vertices_mask & ~sep


def test_induced_merges_equal_restrictions():
    h = parse_hypergraph("r(a,b,c), s(b,c,d), t(c,d)")
    sub = h.induced(mask_of([h.vertex_id("c"), h.vertex_id("d")]))
    # s and t restrict to the same {c,d}; r restricts to {c}
    assert sub.n_edges == 2
    assert set(sub.vertex_names) == {"c", "d"}


def test_lambda_components_use_edge_union_as_separator():
    h = _path(5)
    by_edges = h.lambda_components([h.edge_id("e1"), h.edge_id("e2")])
    by_mask = h.edge_components(h.edge_masks[1] | h.edge_masks[2])
    assert by_edges == by_mask

"""Defining-graph machinery: construction, induced cycles, joins."""

import itertools
import json

import pytest

from morselab.graphs import (
    DefiningGraph,
    build_c4,
    build_cycle,
    build_gamma_d,
    build_omega_d,
    build_p4,
    canonical_cycle,
    cone_off,
    enumerate_induced_4cycles,
    enumerate_induced_cycles,
    family,
    graph_from_parts,
    is_join,
    is_triangle_free,
    join_extendable,
    load_graph,
)
from morselab.errors import ParseError, PreconditionError, ValidationError

from .oracles import (
    brute_induced_cycles,
    brute_is_join,
    brute_join_extendable,
)


def idx(g, *names):
    return frozenset(g.index(n) for n in names)


# -- construction and validation ---------------------------------------------


def test_vertex_order_is_input_order():
    g = graph_from_parts(["z", "a", "m"], [])
    assert g.names == ("z", "a", "m")
    assert g.index("a") == 1


def test_duplicate_vertex_rejected():
    with pytest.raises(ValidationError):
        graph_from_parts(["a", "a"], [])


def test_self_loop_rejected():
    with pytest.raises(ValidationError):
        graph_from_parts(["a", "b"], [["a", "a"]])


def test_unknown_endpoint_rejected():
    with pytest.raises(ValidationError):
        graph_from_parts(["a", "b"], [["a", "c"]])


def test_duplicate_edge_rejected():
    with pytest.raises(ValidationError):
        graph_from_parts(["a", "b"], [["a", "b"], ["b", "a"]])


def test_load_graph_roundtrip(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": ["x", "y"], "edges": [["x", "y"]]}))
    g = load_graph(path)
    assert g.names == ("x", "y")
    assert g.adjacent(0, 1)


def test_load_graph_bad_json(tmp_path):
    path = tmp_path / "g.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_graph(path)


def test_load_graph_missing_key(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": ["x"]}))
    with pytest.raises(ParseError):
        load_graph(path)


def test_digest_ignores_nothing_relevant():
    g1 = graph_from_parts(["a", "b", "c"], [["a", "b"]])
    g2 = graph_from_parts(["a", "b", "c"], [["a", "b"]])
    g3 = graph_from_parts(["a", "b", "c"], [["b", "c"]])
    assert g1.digest() == g2.digest()
    assert g1.digest() != g3.digest()


# -- named families -----------------------------------------------------------


def test_c4_is_a_square():
    g = build_c4()
    assert sorted(g.names) == ["a1", "a2", "b1", "b2"]
    assert len(g.edges) == 4
    assert not g.adjacent(g.index("a1"), g.index("a2"))
    assert not g.adjacent(g.index("b1"), g.index("b2"))
    assert is_triangle_free(g)


def test_p4_is_a_path():
    g = build_p4()
    assert g.names == ("a", "b", "c", "d")
    assert len(g.edges) == 3
    assert not g.adjacent(g.index("a"), g.index("d"))


def test_cycle_sizes():
    for n in (3, 4, 5, 6, 9):
        g = build_cycle(n)
        assert len(g) == n and len(g.edges) == n
    with pytest.raises(ValidationError):
        build_cycle(2)


def test_gamma_d_shape():
    g2 = build_gamma_d(2)
    assert len(g2) == 6 and len(g2.edges) == 8
    assert is_triangle_free(g2)
    g3 = build_gamma_d(3)
    assert len(g3) == 8 and len(g3.edges) == 12
    assert is_triangle_free(g3)


def test_gamma_d_has_no_separating_star():
    # every vertex link misses at least two vertices, so the graph stays
    # connected after removing any closed star
    g = build_gamma_d(2)
    for v in range(len(g)):
        outside = [u for u in range(len(g)) if u != v and not g.adjacent(u, v)]
        assert len(outside) >= 2


def test_omega_d_cones_the_free_pair():
    g = build_omega_d(2)
    assert len(g) == 7 and len(g.edges) == 10
    t = g.index("t")
    nbrs = {g.names[u] for u in range(len(g)) if g.adjacent(t, u)}
    assert nbrs == {"a2", "b2"}
    assert is_triangle_free(g)


def test_family_resolver():
    assert family("c4").names == build_c4().names
    assert family("gamma_d:3").names == build_gamma_d(3).names
    assert family("omega_d:2").names == build_omega_d(2).names
    assert family("cycle:5").names == build_cycle(5).names
    assert family("p4").names == build_p4().names
    with pytest.raises(ValidationError):
        family("k5")


# -- triangle freeness ---------------------------------------------------------


def test_triangle_detection():
    tri = graph_from_parts(["x", "y", "z"], [["x", "y"], ["y", "z"], ["x", "z"]])
    assert not is_triangle_free(tri)
    assert is_triangle_free(build_cycle(5))


# -- induced cycles -------------------------------------------------------------


def test_c4_single_induced_4cycle():
    cycles = enumerate_induced_4cycles(build_c4())
    assert len(cycles) == 1
    assert set(cycles[0].vertices) == {0, 1, 2, 3}


def test_p4_has_no_induced_cycles():
    assert enumerate_induced_cycles(build_p4(), 4, 4) == []


def test_cycle_graph_is_its_own_witness():
    for n in (4, 5, 6):
        cycles = enumerate_induced_cycles(build_cycle(n), 4, n)
        assert len(cycles) == 1
        assert len(cycles[0]) == n


def test_induced_cycle_check_validates():
    g = build_c4()
    cyc = enumerate_induced_4cycles(g)[0]
    cyc.check(g)


def test_min_len_below_four_rejected():
    with pytest.raises(PreconditionError):
        enumerate_induced_cycles(build_c4(), 3, 4)
    with pytest.raises(PreconditionError):
        enumerate_induced_cycles(build_c4(), 5, 4)


def test_canonical_cycle_rotation_reflection():
    a = canonical_cycle([0, 1, 2, 3])
    assert a == canonical_cycle([2, 3, 0, 1])
    assert a == canonical_cycle([3, 2, 1, 0])
    assert a == canonical_cycle([1, 0, 3, 2])


def test_diagonal_pairs_of_square():
    cyc = enumerate_induced_4cycles(build_c4())[0]
    pairs = cyc.diagonal_pairs()
    assert len(pairs) == 2
    for u, v in pairs:
        assert not build_c4().adjacent(u, v)


@pytest.mark.parametrize("builder", [build_gamma_d, build_omega_d])
@pytest.mark.parametrize("d", [2, 3])
def test_induced_cycles_match_bruteforce(builder, d):
    g = builder(d)
    got = {canonical_cycle(list(c.vertices)) for c in enumerate_induced_cycles(g, 4, len(g))}
    assert got == brute_induced_cycles(g, 4, len(g))


def test_gamma_2_has_five_induced_4cycles():
    g = build_gamma_d(2)
    cycles = enumerate_induced_4cycles(g)
    assert len(cycles) == 5
    names = {tuple(sorted(g.names[v] for v in c.vertices)) for c in cycles}
    assert ("a0", "a1", "a2", "b0") in names
    # no induced 4-cycle passes through both ends of the chain
    assert not any({"a2", "b2"} <= set(t) for t in names)


def test_dense_random_graphs_match_bruteforce():
    import random

    rng = random.Random(7)
    for trial in range(12):
        n = rng.randint(4, 7)
        names = [f"v{i}" for i in range(n)]
        edges = [
            [names[i], names[j]]
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.45
        ]
        g = graph_from_parts(names, edges)
        got = {canonical_cycle(list(c.vertices)) for c in enumerate_induced_cycles(g, 4, n)}
        assert got == brute_induced_cycles(g, 4, n), f"trial {trial}"


# -- joins ---------------------------------------------------------------------


def test_c4_is_a_join():
    g = build_c4()
    assert is_join(g, idx(g, "a1", "a2", "b1", "b2"))
    assert is_join(g, idx(g, "a1", "b1"))
    assert not is_join(g, idx(g, "a1", "a2"))
    assert not is_join(g, idx(g, "a1"))


def test_is_join_empty_rejected():
    with pytest.raises(PreconditionError):
        is_join(build_c4(), frozenset())


def test_join_extendable_examples():
    g = build_p4()
    # {a, c} lies in st(b); {a, d} does not extend to any join
    assert join_extendable(g, idx(g, "a", "c"))
    assert not join_extendable(g, idx(g, "a", "d"))
    assert join_extendable(g, idx(g, "a"))


def test_joins_match_bruteforce():
    import random

    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(3, 6)
        names = [f"v{i}" for i in range(n)]
        edges = [
            [names[i], names[j]]
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.5
        ]
        g = graph_from_parts(names, edges)
        for size in range(1, n + 1):
            for combo in itertools.combinations(range(n), size):
                s = frozenset(combo)
                assert is_join(g, s) == brute_is_join(g, s)
                assert join_extendable(g, s) == brute_join_extendable(g, s)


# -- coning --------------------------------------------------------------------


def test_cone_off_adds_one_vertex():
    g = build_gamma_d(2)
    coned = cone_off(g, "a2", "b2", "t")
    assert len(coned) == len(g) + 1
    assert coned.names[: len(g)] == g.names
    t = coned.index("t")
    assert coned.adjacent(t, coned.index("a2"))
    assert coned.adjacent(t, coned.index("b2"))
    assert len(coned.edges) == len(g.edges) + 2


def test_cone_off_rejects_adjacent_pair():
    with pytest.raises(PreconditionError):
        cone_off(build_c4(), "a1", "b1", "t")


def test_cone_off_rejects_name_collision():
    with pytest.raises(PreconditionError):
        cone_off(build_c4(), "a1", "a2", "b1")


def test_omega_is_cone_of_gamma():
    g = build_gamma_d(2)
    coned = cone_off(g, "a2", "b2", "t")
    om = build_omega_d(2)
    assert coned.names == om.names
    assert coned.edges == om.edges

import networkx as nx
import numpy as np
import pytest

from gblab import (
    BadParameter,
    CoreTooSmall,
    build_graph,
    dary_tree,
    degree,
    delta_kernel_outside,
    electrical_weights,
    family_spec,
    grid,
    path_graph,
    ray,
    single_vertex,
    star_like,
    zline,
)
from gblab.graph import ball
from oracles import random_graph, to_networkx


def test_path_graph():
    g = path_graph(5)
    assert (g.n_vertices, g.n_edges) == (5, 4)
    assert np.flatnonzero(g.frontier).tolist() == [0, 4]
    with pytest.raises(BadParameter):
        path_graph(1)


@pytest.mark.parametrize("d, side", [(1, 5), (2, 3), (2, 6), (3, 2), (3, 4)])
def test_grid_counts(d, side):
    g = grid(d, side)
    assert g.n_vertices == side**d
    assert g.n_edges == d * side ** (d - 1) * (side - 1)
    G = nx.grid_graph(dim=[side] * d)
    assert g.n_edges == G.number_of_edges()
    shell = side**d - max(side - 2, 0) ** d
    assert int(g.frontier.sum()) == shell


def test_grid_bad_parameters():
    for args in [(4, 3), (2, 1), (0, 3)]:
        with pytest.raises(BadParameter):
            grid(*args)


def test_grid_labels_are_centred():
    g = grid(2, 7)
    assert g.labels[g.origin] == (0, 0)
    assert g.index_of((-3, 3)) in np.flatnonzero(g.frontier)
    assert zline(4).labels[zline(4).origin] == 0


def test_triadic_tree_degrees_and_counts():
    g = dary_tree(2, 3)
    interior = np.flatnonzero(~g.frontier)
    assert all(degree(g, x) == 3 for x in interior)
    for depth in range(1, 7):
        t = dary_tree(2, depth)
        G = to_networkx(t)
        assert t.n_vertices == len(nx.single_source_shortest_path_length(G, 0))
        assert t.n_vertices == 3 * 2**depth - 2
        assert nx.is_tree(G)


def test_tree_labels_stable_across_truncations():
    small, big = dary_tree(2, 3), dary_tree(2, 5)
    for i, lab in enumerate(small.labels):
        assert big.index_of(lab) == i


def test_tree_bad_parameters():
    with pytest.raises(BadParameter):
        dary_tree(1, 3)
    with pytest.raises(BadParameter):
        dary_tree(2, 0)


def test_ternary_tree_is_cycle_free():
    g = dary_tree(3, 4)
    assert {degree(g, x) for x in np.flatnonzero(~g.frontier)} == {4}
    for k in range(3):
        assert delta_kernel_outside(g, ball(g, 0, k))[0] == 0


def test_star_like_single_core_three_rays():
    g = star_like(single_vertex(), 3, 6)
    assert degree(g, 0) == 3
    assert g.n_vertices == 1 + 18
    G = to_networkx(g)
    G.remove_node(0)
    comps = list(nx.connected_components(G))
    assert len(comps) == 3
    assert all(nx.is_isomorphic(G.subgraph(c), nx.path_graph(6)) for c in comps)
    assert int(g.frontier.sum()) == 3


def test_star_like_distinct_and_errors():
    core = build_graph(np.ones(3), [(0, 1, 1.0), (1, 2, 1.0)])
    g = star_like(core, 3, 4, distinct=True)
    G = to_networkx(g)
    G.remove_nodes_from(range(3))
    assert nx.number_connected_components(G) == 3
    with pytest.raises(CoreTooSmall):
        star_like(core, 4, 4, distinct=True)
    with pytest.raises(BadParameter):
        star_like(core, 0, 4)
    with pytest.raises(BadParameter):
        star_like(core, 2, 1)


def test_ray_layout():
    g = ray(6)
    assert g.labels[4] == ("ray", 0, 4)
    assert np.flatnonzero(g.frontier).tolist() == [6]


def test_electrical_weights():
    g = build_graph([1, 1], [(0, 1, 2.0)])
    assert electrical_weights(g).c.tolist() == [0.5, 0.5]
    h = build_graph(np.ones(3), [(0, 1, 1.0), (1, 2, 1.0)])
    assert electrical_weights(h).c.tolist() == [1.0, 2.0, 1.0]
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_graph(rng, 25)
        e = electrical_weights(g)
        naive = [sum(1.0 / g.r[j] for j in range(g.n_edges) if x in (g.tail[j], g.head[j])) for x in range(25)]
        assert np.abs(e.c - naive).max() < 1e-14 * max(naive)


def test_family_registry():
    spec = family_spec("star-like", rays=5)
    g = spec.build(4)
    assert degree(g, 0) == 5
    with pytest.raises(BadParameter):
        family_spec("nope")
    with pytest.raises(BadParameter):
        family_spec("triadic", rays=3)
    with pytest.raises(BadParameter):
        family_spec("grid2").build(1)
    e = family_spec("zline", weights="electrical").build(4)
    assert e.c[e.origin] == 2.0

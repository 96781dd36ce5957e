import copy

import pytest

from subforge.language import build_gamma, cone_type_classes
from subforge.subdivision import (
    assign_labels,
    build_subdivision_graph,
    cone_neighborhood,
    geodesically_close,
    involuted_label,
    outward_vertices,
    verify_axioms,
    working_constant,
)


def _assert_witness_valid(ball, u1, u2, w):
    assert ball.sphere_of[u1] == ball.sphere_of[u2]
    for u, v in ((u1, w.first), (u2, w.second)):
        need = ball.sphere_of[v] - ball.sphere_of[u]
        assert need >= 0
        assert ball.distance_between(u, v, need) == need  # on an outward geodesic
    if w.separation == 0:
        assert w.first == w.second
    else:
        assert w.second in ball.neighbors[w.first].values()


@pytest.fixture(scope="module")
def surface_k2(surface_ball):
    # forced K=2 widens the trusted region enough to exercise edge
    # subdivisions (cone typing at K=2 is knowingly undersized)
    tree = build_gamma(surface_ball)
    table = cone_type_classes(surface_ball, 2)
    graph = build_subdivision_graph(surface_ball, tree, 0.5, k_override=2)
    assign_labels(graph, table)
    return graph, table


def test_working_constant():
    assert working_constant(0.0) == 1
    assert working_constant(0.5) == 2
    assert working_constant(1.0) == 3
    assert working_constant(2.0) == 5


def test_outward_vertices_tree(f2_ball):
    # in a free group the outward cone of a letter is exactly the reduced
    # words extending it
    a = f2_ball.element_of("a")
    cone = outward_vertices(f2_ball, a, 3)
    expected = {
        v
        for v in range(f2_ball.size)
        if f2_ball.sphere_of[v] <= 3 and f2_ball.normal_forms[v][:1] == (f2_ball.normal_forms[a][0],)
    }
    assert cone == expected


def test_geodesically_close_f2_none(f2_ball):
    a, b = f2_ball.element_of("a"), f2_ball.element_of("b")
    assert geodesically_close(f2_ball, a, b, 6) is None


def test_geodesically_close_z_none(z_ball):
    a, inv = z_ball.element_of("a"), z_ball.element_of("A")
    assert geodesically_close(z_ball, a, inv, 8) is None


def test_geodesically_close_surface_octagon(surface_ball):
    a, d = surface_ball.element_of("a"), surface_ball.element_of("d")
    w = geodesically_close(surface_ball, a, d, 5)
    assert w is not None
    _assert_witness_valid(surface_ball, a, d, w)
    # non-partners on the vertex's octagons stay separated
    for other in ("b", "c"):
        assert geodesically_close(surface_ball, a, surface_ball.element_of(other), 5) is None


def test_geodesically_close_preconditions(f2_ball):
    with pytest.raises(ValueError):
        geodesically_close(f2_ball, 1, 1, 6)
    with pytest.raises(ValueError):
        geodesically_close(f2_ball, 1, f2_ball.element_of("ab"), 6)
    with pytest.raises(ValueError):
        geodesically_close(f2_ball, 1, 2, 99)


def test_distance_one_pairs_are_close(surface_small_ball):
    # adjacency at equal levels forces closeness with the trivial witness;
    # no supported desk-scale group is non-bipartite, so inject an edge
    ball = copy.deepcopy(surface_small_ball)
    a, b = ball.element_of("a"), ball.element_of("b")
    letter = next(x for x, t in ball.neighbors[a].items() if ball.sphere_of[t] == 2)
    ball.neighbors[a][letter] = b
    w = geodesically_close(ball, a, b, 3)
    assert w is not None
    assert (w.first, w.second, w.separation) == (a, b, 1)


def test_build_f2_no_horizontal(f2_run):
    graph = f2_run.artifacts.graph
    assert graph.edge_count() == 0
    assert graph.n_max == 4
    assert graph.unstable_levels == ()


def test_build_z_two_rays(z_run):
    graph = z_run.artifacts.graph
    assert graph.edge_count() == 0
    ball = graph.ball
    assert all(len(s) == 2 for s in ball.spheres[1:])


def test_surface_level_one_is_octagon_cycle(surface_labeled_run):
    graph = surface_labeled_run.artifacts.graph
    assert graph.n_max == 1
    edges = graph.level_edges[1]
    assert len(edges) == 8
    degree = {}
    for u, v in edges:
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
    # relator octagons pair each generator with exactly two partners
    assert set(degree.values()) == {2} and len(degree) == 8
    for u, v in edges:
        _assert_witness_valid(graph.ball, u, v, graph.witnesses[(u, v)])


def test_prefilter_loses_nothing(surface_ball):
    tree = build_gamma(surface_ball)
    with_f = build_subdivision_graph(surface_ball, tree, 1.0, prefilter=True)
    without = build_subdivision_graph(surface_ball, tree, 1.0, prefilter=False)
    assert with_f.level_edges == without.level_edges


def test_undersized_k_prefilter_is_detectably_lossy(surface_ball):
    # with K below the true working constant the distance prefilter drops
    # the distance-4 close pairs (octagon halves meeting at a common
    # outward vertex); the no-prefilter diff finds them and the closeness
    # bound check flags the graph
    from subforge.subdivision import check_lemma_bound

    tree = build_gamma(surface_ball)
    filtered = build_subdivision_graph(surface_ball, tree, 0.5, k_override=2)
    unfiltered = build_subdivision_graph(
        surface_ball, tree, 0.5, k_override=2, prefilter=False
    )
    extra = set(unfiltered.level_edges[2]) - set(filtered.level_edges[2])
    assert len(extra) == 8
    ab, dc = surface_ball.element_of("ab"), surface_ball.element_of("dc")
    assert (min(ab, dc), max(ab, dc)) in extra
    report = check_lemma_bound(unfiltered)
    assert not report.passed and report.max_observed == 4


def test_horizon_monotone(surface_ball):
    tree = build_gamma(surface_ball)
    graphs = {
        h: build_subdivision_graph(surface_ball, tree, 1.0, horizon=h) for h in (3, 4, 5)
    }
    e3 = set(graphs[3].level_edges[1])
    e4 = set(graphs[4].level_edges[1])
    e5 = set(graphs[5].level_edges[1])
    assert e3 <= e4 <= e5
    # the octagon edges need depth-4 witnesses: fresh at horizon 4, stable at 5
    assert e3 == set() and len(e4) == 8
    assert graphs[4].unstable_levels == (1,)
    assert graphs[5].unstable_levels == ()


def test_labels_f2(f2_run):
    graph = f2_run.artifacts.graph
    labels = set(graph.vertex_labels.values())
    assert len(labels) == 5
    assert all(lab.neighborhood == () for lab in labels)


def test_labels_surface(surface_labeled_run):
    graph = surface_labeled_run.artifacts.graph
    ball = graph.ball
    for (u, v), label in graph.edge_labels.items():
        # the closeness lemma's sharper bound: relative element under K
        assert len(label.relative) < graph.k
        assert ball.element_of(label.relative) == ball.relative_element(u, v)
    for v in ball.spheres[1]:
        assert len(graph.vertex_labels[v].neighborhood) == 2


def test_cone_neighborhood_matches_labels(surface_labeled_run):
    graph = surface_labeled_run.artifacts.graph
    table = surface_labeled_run.artifacts.table
    ball = graph.ball
    for level in range(0, graph.n_max + 1):
        for g in ball.spheres[level]:
            assert cone_neighborhood(ball, table, g) == graph.vertex_labels[g]


def test_cone_neighborhood_identity_empty(f2_run):
    assert f2_run.artifacts.graph.vertex_labels[0].neighborhood == ()


def test_edge_label_involution(surface_labeled_run):
    graph = surface_labeled_run.artifacts.graph
    ball = graph.ball
    for (u, v), label in graph.edge_labels.items():
        back = involuted_label(label, ball)
        assert (back.type_a, back.type_b) == (label.type_b, label.type_a)
        assert involuted_label(back, ball) == label


def test_axioms_f2(f2_run):
    rep = f2_run.artifacts.axiom_report
    assert rep.all_passed
    assert len(rep.vertex_subdivisions) == 5
    assert len(rep.edge_subdivisions) == 0
    sizes = sorted(g.size for g in rep.vertex_subdivisions.values())
    assert sizes == [3, 3, 3, 3, 4]


def test_axioms_z(z_run):
    rep = z_run.artifacts.axiom_report
    assert rep.all_passed
    assert len(rep.vertex_subdivisions) == 3
    assert len(rep.edge_subdivisions) == 0


def test_axioms_surface_labeled(surface_labeled_run):
    rep = surface_labeled_run.artifacts.axiom_report
    assert rep.all_passed
    cond = {c.index: c for c in rep.conditions}
    assert cond[4].domain_size == 8
    assert cond[5].domain_size == 9


def test_axioms_surface_k2_edge_subdivisions(surface_k2):
    graph, _ = surface_k2
    rep = verify_axioms(graph)
    assert rep.all_passed
    assert rep.edge_subdivisions and len(rep.edge_subdivisions) >= 1
    for sub in rep.edge_subdivisions.values():
        sides = {lab[0] for lab in sub.vertex_labels}
        assert sides == {0, 1}
        for i, j, _lab in sub.edges:
            assert sub.vertex_labels[i][0] != sub.vertex_labels[j][0]


def test_corrupted_label_fails_condition5(f2_run):
    graph = copy.deepcopy(f2_run.artifacts.graph)
    items = sorted(graph.vertex_labels)
    v = items[0]
    other = next(w for w in items if graph.vertex_labels[w] != graph.vertex_labels[v])
    graph.vertex_labels[v] = graph.vertex_labels[other]
    rep = verify_axioms(graph)
    cond5 = next(c for c in rep.conditions if c.index == 5)
    assert not cond5.passed
    assert cond5.counterexample is not None


def test_lemma_bound(surface_labeled_run):
    lb = surface_labeled_run.artifacts.lemma_report
    assert lb.passed
    assert lb.max_observed == 2  # octagon partners sit at distance 2
    assert lb.edge_count == 8


def test_witness_inheritance_in_condition4(surface_k2):
    graph, _ = surface_k2
    rep = verify_axioms(graph)
    cond4 = next(c for c in rep.conditions if c.index == 4)
    assert cond4.passed and cond4.domain_size == 56

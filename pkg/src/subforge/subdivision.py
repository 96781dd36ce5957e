"""The leveled subdivision graph: construction, labels and the six axioms.

The graph contains the geodesic tree (vertical edges) plus a horizontal
edge between every pair of same-level vertices that are geodesically
close: each admits an outward geodesic (|v| = |u| + d(u, v) all along) and
the two geodesics pass within distance 1 of each other at vertices no
closer to the origin.  The witness search is exhaustive out to the horizon
and returns the witness minimizing (depth of first vertex, shortlex, shortlex),
so results are reproducible.

Levels up to n_max = R - K - 1 (K = ceil(2*delta) + 1) carry complete label
data: vertex labels are cone K-neighborhoods (each geodesically close
partner h with |h| < K tagged with the cone type of g h), horizontal edge
labels carry the endpoint cone types and the relative group element, and
all vertical edges share one reserved label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ball import CayleyBall
from .labeled_graph import LabeledGraph, find_isomorphism
from .language import ConeTypeTable, GeodesicTree, InternalConsistencyError
from .words import Word


@dataclass(frozen=True)
class Witness:
    """Outward vertices certifying a geodesically close pair."""

    first: int
    second: int
    separation: int  # 0: geodesics meet, 1: adjacent vertices


@dataclass(frozen=True)
class VertexLabel:
    own_type: int
    neighborhood: tuple[tuple[Word, int], ...]  # (relative normal form, cone type)


@dataclass(frozen=True)
class EdgeLabel:
    type_a: int
    type_b: int
    relative: Word  # normal form of u^-1 v in canonical (smaller id first) orientation


@dataclass
class SubdivisionGraph:
    ball: CayleyBall
    tree: GeodesicTree
    k: int
    n_max: int
    horizon: int
    delta: float
    level_edges: dict[int, tuple[tuple[int, int], ...]]
    witnesses: dict[tuple[int, int], Witness]
    unstable_levels: tuple[int, ...]
    vertex_labels: dict[int, VertexLabel] = field(default_factory=dict)
    edge_labels: dict[tuple[int, int], EdgeLabel] = field(default_factory=dict)
    label_warnings: tuple[str, ...] = ()

    @property
    def labeled(self) -> bool:
        return bool(self.vertex_labels) or self.n_max < 0

    def all_level_edges(self):
        for n in sorted(self.level_edges):
            for e in self.level_edges[n]:
                yield n, e

    def edge_count(self) -> int:
        return sum(len(v) for v in self.level_edges.values())

    def partners(self, v: int) -> list[int]:
        out = []
        for u, w in self.level_edges.get(self.ball.sphere_of[v], ()):
            if u == v:
                out.append(w)
            elif w == v:
                out.append(u)
        return out


def outward_vertices(ball: CayleyBall, u: int, horizon: int) -> set[int]:
    """Vertices v with |v| = |u| + d(u, v) <= horizon (vertices on
    geodesics from the origin through u, by the layered-closure argument)."""
    out = {u}
    frontier = [u]
    for level in range(ball.sphere_of[u] + 1, horizon + 1):
        nxt = []
        for v in frontier:
            for w in ball.neighbors[v].values():
                if ball.sphere_of[w] == level and w not in out:
                    out.add(w)
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return out


def geodesically_close(
    ball: CayleyBall,
    u1: int,
    u2: int,
    horizon: int,
    _outward_cache: dict[int, set[int]] | None = None,
) -> Witness | None:
    """Exhaustive witness search within the horizon; returns the minimal
    witness or None.  Requires distinct same-level vertices."""
    if u1 == u2:
        raise ValueError("geodesically close is only defined for distinct vertices")
    if ball.sphere_of[u1] != ball.sphere_of[u2]:
        raise ValueError("geodesically close requires equal levels")
    if horizon > ball.radius:
        raise ValueError("horizon exceeds ball radius")

    def outward(u: int) -> set[int]:
        if _outward_cache is None:
            return outward_vertices(ball, u, horizon)
        got = _outward_cache.get(u)
        if got is None:
            got = outward_vertices(ball, u, horizon)
            _outward_cache[u] = got
        return got

    o1 = outward(u1)
    o2 = outward(u2)
    for v1 in sorted(o1):
        candidates = []
        if v1 in o2:
            candidates.append((v1, 0))
        for w in ball.neighbors[v1].values():
            if w in o2:
                candidates.append((w, 1))
        if candidates:
            v2, sep = min(candidates)
            return Witness(v1, v2, sep)
    return None


def same_level_within(ball: CayleyBall, u: int, k: int) -> list[int]:
    """Same-level vertices at Cayley distance <= k from u (ids above u).
    Exact at trusted levels, where |u| + k < ball radius."""
    level = ball.sphere_of[u]
    seen = {u}
    frontier = [u]
    found = []
    for _ in range(k):
        nxt = []
        for v in frontier:
            for w in ball.neighbors[v].values():
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
                    if w > u and ball.sphere_of[w] == level:
                        found.append(w)
        frontier = nxt
    return sorted(found)


def working_constant(delta: float) -> int:
    """Integer working radius ceil(2*delta) + 1 used for cone typing and
    the horizontal-edge prefilter."""
    return math.ceil(2 * delta) + 1


def build_subdivision_graph(
    ball: CayleyBall,
    tree: GeodesicTree,
    delta: float,
    horizon: int | None = None,
    k_override: int | None = None,
    prefilter: bool = True,
) -> SubdivisionGraph:
    """Detect all geodesically close pairs on levels <= n_max and attach
    them as horizontal edges.

    With ``prefilter`` the candidate pairs are restricted to Cayley
    distance <= K, which loses nothing by the closeness lemma (checked
    separately); passing ``prefilter=False`` re-runs the search over all
    same-level pairs for cross-validation.  A level is flagged unstable
    when some edge's minimal witness needs the full horizon, i.e. the edge
    would be absent at horizon - 1.
    """
    k = working_constant(delta) if k_override is None else k_override
    horizon = ball.radius if horizon is None else horizon
    if horizon > ball.radius:
        raise ValueError("horizon exceeds ball radius")
    n_max = ball.radius - k - 1
    level_edges: dict[int, tuple[tuple[int, int], ...]] = {}
    witnesses: dict[tuple[int, int], Witness] = {}
    unstable = set()
    cache: dict[int, set[int]] = {}
    for n in range(1, n_max + 1):
        edges = []
        for u in ball.spheres[n]:
            if prefilter:
                candidates = same_level_within(ball, u, k)
            else:
                candidates = [v for v in ball.spheres[n] if v > u]
            for v in candidates:
                w = geodesically_close(ball, u, v, horizon, cache)
                if w is None:
                    continue
                edges.append((u, v))
                witnesses[(u, v)] = w
                if max(ball.sphere_of[w.first], ball.sphere_of[w.second]) >= horizon:
                    unstable.add(n)
        level_edges[n] = tuple(sorted(edges))
        cache.clear()
    return SubdivisionGraph(
        ball=ball,
        tree=tree,
        k=k,
        n_max=n_max,
        horizon=horizon,
        delta=delta,
        level_edges=level_edges,
        witnesses=witnesses,
        unstable_levels=tuple(sorted(unstable)),
    )


def cone_neighborhood(
    ball: CayleyBall, table: ConeTypeTable, g: int, horizon: int | None = None
) -> VertexLabel:
    """Cone K-neighborhood of g: each h with |h| < K and (g, g h)
    geodesically close, tagged with the cone type of g h."""
    k = table.k
    horizon = ball.radius if horizon is None else horizon
    level = ball.sphere_of[g]
    if level + k > ball.radius:
        raise ValueError(f"cone neighborhood of |g|={level} needs radius {level + k}")
    members = []
    for h in range(1, ball.size):
        if ball.sphere_of[h] >= k:
            break
        gh = ball.walk(g, ball.normal_forms[h])
        if gh is None:
            raise InternalConsistencyError("in-trust walk left the ball")
        if gh == g or ball.sphere_of[gh] != level:
            continue
        if geodesically_close(ball, g, gh, horizon) is not None:
            members.append((ball.normal_forms[h], table.class_of[gh]))
    members.sort(key=lambda m: ((len(m[0]), m[0]), m[1]))
    return VertexLabel(own_type=table.class_of[g], neighborhood=tuple(members))


def assign_labels(graph: SubdivisionGraph, table: ConeTypeTable) -> SubdivisionGraph:
    """Attach vertex and edge labels on levels <= n_max.

    Vertex neighborhoods are derived from the already-computed horizontal
    edges (the closeness lemma makes the two definitions agree; a partner
    at distance >= K would contradict it and is flagged).
    """
    if table.k != graph.k:
        raise ValueError("cone-type table K does not match the graph")
    ball = graph.ball
    warnings: list[str] = []
    vertex_labels: dict[int, VertexLabel] = {}
    edge_labels: dict[tuple[int, int], EdgeLabel] = {}
    rel_cache: dict[tuple[int, int], Word] = {}

    def relative_form(u: int, v: int) -> Word:
        got = rel_cache.get((u, v))
        if got is None:
            h = ball.relative_element(u, v)
            if h is None:
                raise InternalConsistencyError("relative element left the ball")
            got = ball.normal_forms[h]
            rel_cache[(u, v)] = got
        return got

    for n in range(0, graph.n_max + 1):
        for v in ball.spheres[n]:
            members = []
            for p in graph.partners(v):
                h = relative_form(v, p)
                if len(h) >= graph.k:
                    warnings.append(
                        f"partner of element {v} at distance {len(h)} >= K={graph.k}"
                    )
                members.append((h, table.class_of[p]))
            members.sort(key=lambda m: ((len(m[0]), m[0]), m[1]))
            vertex_labels[v] = VertexLabel(own_type=table.class_of[v], neighborhood=tuple(members))
    for n, (u, v) in graph.all_level_edges():
        edge_labels[(u, v)] = EdgeLabel(
            type_a=table.class_of[u],
            type_b=table.class_of[v],
            relative=relative_form(u, v),
        )
    graph.vertex_labels = vertex_labels
    graph.edge_labels = edge_labels
    graph.label_warnings = tuple(warnings)
    return graph


def involuted_label(label: EdgeLabel, ball: CayleyBall) -> EdgeLabel:
    """The same edge read in the opposite orientation."""
    back = ball.element_of(
        tuple(ball.presentation.alphabet.inverse[x] for x in reversed(label.relative))
    )
    if back is None:
        raise InternalConsistencyError("involuted relative element left the ball")
    return EdgeLabel(label.type_b, label.type_a, ball.normal_forms[back])


def _label_sort_key(label: EdgeLabel):
    return (label.type_a, label.type_b, len(label.relative), label.relative)


def oriented_edge_label(graph: SubdivisionGraph, u: int, v: int) -> EdgeLabel:
    """Edge label as read from u toward v."""
    key = (u, v) if u < v else (v, u)
    label = graph.edge_labels[key]
    if u < v:
        return label
    return involuted_label(label, graph.ball)


def orientation_free_label(graph: SubdivisionGraph, u: int, v: int) -> EdgeLabel:
    """Canonical value-min of the two orientations (used inside comparison
    graphs so vertex numbering cannot flip labels)."""
    a = oriented_edge_label(graph, u, v)
    b = oriented_edge_label(graph, v, u)
    return min(a, b, key=_label_sort_key)


# ---------------------------------------------------------------------------
# Axioms 1-6
# ---------------------------------------------------------------------------


@dataclass
class ConditionResult:
    index: int
    name: str
    passed: bool
    domain_size: int
    counterexample: tuple | None = None
    note: str = ""


@dataclass
class AxiomReport:
    conditions: list[ConditionResult]
    vertex_subdivisions: dict[VertexLabel, LabeledGraph] | None
    edge_subdivisions: dict[EdgeLabel, LabeledGraph] | None

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.conditions)


def _star_summary(graph: SubdivisionGraph, v: int):
    up = 1 if v != 0 else 0
    down = len(graph.tree.children[v])
    horizontal = sorted(
        (_label_sort_key(oriented_edge_label(graph, v, p)) for p in graph.partners(v)),
    )
    return (up, down, tuple(horizontal))


def _vertex_subdivision(graph: SubdivisionGraph, v: int) -> LabeledGraph:
    """Children of v with their labels plus the horizontal edges among
    them (the predecessor-map preimage of v's open star)."""
    kids = sorted(graph.tree.children[v])
    pos = {c: i for i, c in enumerate(kids)}
    labels = tuple(graph.vertex_labels[c] for c in kids)
    edges = []
    level = graph.ball.sphere_of[v] + 1
    for a, b in graph.level_edges.get(level, ()):
        if a in pos and b in pos:
            i, j = sorted((pos[a], pos[b]))
            edges.append((i, j, _label_sort_key(orientation_free_label(graph, a, b))))
    return LabeledGraph(labels, tuple(sorted(edges)))


def _edge_subdivision(graph: SubdivisionGraph, u: int, v: int, swap: bool = False) -> LabeledGraph:
    """Bipartite preimage of the edge (u, v): children of both endpoints,
    side-tagged, with the horizontal edges crossing between the sides."""
    side_a, side_b = (v, u) if swap else (u, v)
    kids_a = sorted(graph.tree.children[side_a])
    kids_b = sorted(graph.tree.children[side_b])
    labels = tuple(
        [(0, graph.vertex_labels[c]) for c in kids_a]
        + [(1, graph.vertex_labels[c]) for c in kids_b]
    )
    pos = {c: i for i, c in enumerate(kids_a)}
    pos.update({c: len(kids_a) + i for i, c in enumerate(kids_b)})
    level = graph.ball.sphere_of[u] + 1
    edges = []
    for a, b in graph.level_edges.get(level, ()):
        in_a = a in pos and b in pos
        if not in_a:
            continue
        pa = graph.ball.parent[a]
        pb = graph.ball.parent[b]
        if {pa, pb} != {side_a, side_b}:
            continue
        first, second = (a, b) if pa == side_a else (b, a)
        i, j = sorted((pos[first], pos[second]))
        edges.append((i, j, _label_sort_key(oriented_edge_label(graph, first, second))))
    return LabeledGraph(labels, tuple(sorted(edges)))


def verify_axioms(graph: SubdivisionGraph) -> AxiomReport:
    """Check the six combinatorial-subdivision-graph conditions.

    Structural conditions (1-3) are checked on the full ball; conditions
    that need horizontal edges or labels quantify only over levels where
    that data is complete (4: levels <= n_max, 5: vertices at levels
    <= n_max, 6: preimages living at levels <= n_max).
    """
    ball = graph.ball
    conditions: list[ConditionResult] = []

    # 1: the bottom level is a single vertex
    ok1 = ball.spheres[0] == [0]
    conditions.append(ConditionResult(1, "level 0 is a single vertex", ok1, 1))

    # 2: levels partition the vertices
    total = sum(len(s) for s in ball.spheres)
    ok2 = total == ball.size and all(
        ball.sphere_of[e] == n for n, s in enumerate(ball.spheres) for e in s
    )
    conditions.append(ConditionResult(2, "every vertex lies in exactly one level", ok2, ball.size))

    # 3: unique predecessor one level down
    bad3 = None
    for e in range(1, ball.size):
        p = ball.parent[e]
        if ball.sphere_of[p] != ball.sphere_of[e] - 1:
            bad3 = (e, p)
            break
    conditions.append(
        ConditionResult(3, "unique predecessor one level down", bad3 is None, ball.size - 1, bad3)
    )

    # 4: predecessors of edge endpoints are equal or connected
    domain4 = 0
    bad4 = None
    note4 = ""
    for n, (u, v) in graph.all_level_edges():
        domain4 += 1
        pu, pv = ball.parent[u], ball.parent[v]
        if pu == pv:
            continue
        if (min(pu, pv), max(pu, pv)) not in graph.witnesses:
            bad4 = (u, v, pu, pv)
            break
        # witness inheritance: the witness for (u, v) certifies the parents
        w = graph.witnesses[(u, v)]
        for parent, outer in ((pu, w.first), (pv, w.second)):
            need = ball.sphere_of[outer] - ball.sphere_of[parent]
            d = ball.distance_between(parent, outer, need)
            if d != need:
                bad4 = (u, v, parent, outer)
                note4 = "witness not inherited by predecessors"
                break
        if bad4:
            break
    conditions.append(
        ConditionResult(4, "predecessors of connected vertices connected or equal", bad4 is None, domain4, bad4, note4)
    )

    labels_ready = graph.n_max >= 0 and (graph.vertex_labels or ball.size == 0)

    # 5: open stars of same-label vertices are isomorphic
    domain5 = 0
    bad5 = None
    star_groups: dict[VertexLabel, tuple[int, tuple]] = {}
    if labels_ready:
        for n in range(0, graph.n_max + 1):
            for v in ball.spheres[n]:
                domain5 += 1
                label = graph.vertex_labels[v]
                summary = _star_summary(graph, v)
                rep = star_groups.get(label)
                if rep is None:
                    star_groups[label] = (v, summary)
                elif rep[1] != summary and bad5 is None:
                    bad5 = (rep[0], v)
    conditions.append(
        ConditionResult(5, "same-label open stars isomorphic", bad5 is None, domain5, bad5)
    )

    # 6: same-label predecessor-map preimages are isomorphic
    domain6 = 0
    bad6 = None
    note6 = ""
    vertex_subs: dict[VertexLabel, LabeledGraph] = {}
    edge_subs: dict[EdgeLabel, LabeledGraph] = {}
    if labels_ready:
        vs_groups: dict[VertexLabel, tuple[int, LabeledGraph]] = {}
        for n in range(0, graph.n_max):
            for v in ball.spheres[n]:
                domain6 += 1
                label = graph.vertex_labels[v]
                sub = _vertex_subdivision(graph, v)
                rep = vs_groups.get(label)
                if rep is None:
                    vs_groups[label] = (v, sub)
                elif bad6 is None and find_isomorphism(rep[1], sub) is None:
                    bad6 = ("vertex", rep[0], v)
                    note6 = "vertex-subdivision mismatch"
        # edges are grouped by the orientation-normalized label: min of the
        # stored label and its involution, with the preimage sides ordered
        # to match that normalization
        es_groups: dict[tuple, tuple[tuple[int, int], LabeledGraph, EdgeLabel]] = {}
        for n, (u, v) in graph.all_level_edges():
            if n + 1 > graph.n_max:
                continue
            domain6 += 1
            stored = graph.edge_labels[(u, v)]
            inverted = involuted_label(stored, ball)
            canon = min(stored, inverted, key=_label_sort_key)
            symmetric = _label_sort_key(stored) == _label_sort_key(inverted)
            sub = _edge_subdivision(graph, u, v, swap=canon is inverted and not symmetric)
            key = _label_sort_key(canon)
            rep = es_groups.get(key)
            if rep is None:
                es_groups[key] = ((u, v), sub, canon)
            elif bad6 is None and find_isomorphism(rep[1], sub) is None:
                swapped = _edge_subdivision(graph, u, v, swap=True) if symmetric else None
                if swapped is None or find_isomorphism(rep[1], swapped) is None:
                    bad6 = ("edge", rep[0], (u, v))
                    note6 = "edge-subdivision mismatch"
        if bad6 is None:
            vertex_subs = {label: sub for label, (_, sub) in vs_groups.items()}
            edge_subs = {canon: sub for _, (_, sub, canon) in es_groups.items()}
    conditions.append(
        ConditionResult(6, "same-label preimages isomorphic", bad6 is None, domain6, bad6, note6)
    )

    emit = labels_ready and bad5 is None and bad6 is None
    return AxiomReport(
        conditions=conditions,
        vertex_subdivisions=vertex_subs if emit else None,
        edge_subdivisions=edge_subs if emit else None,
    )


@dataclass
class LemmaBoundReport:
    passed: bool
    bound: int
    max_observed: int
    edge_count: int
    witness: tuple[int, int] | None


def check_lemma_bound(graph: SubdivisionGraph) -> LemmaBoundReport:
    """Every geodesically close pair must lie within ceil(2*delta) + 1 in
    the Cayley graph (the closeness lemma, with the integer ceiling)."""
    bound = graph.k
    worst = 0
    witness = None
    count = 0
    for _, (u, v) in graph.all_level_edges():
        count += 1
        label = graph.edge_labels.get((u, v))
        if label is not None:
            d = len(label.relative)
        else:
            d = graph.ball.distance_between(u, v, bound + 2) or bound + 2
        if d > worst:
            worst = d
            witness = (u, v)
    return LemmaBoundReport(worst <= bound, bound, worst, count, witness)

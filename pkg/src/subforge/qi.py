"""Quasi-isometry checks between the subdivision graph and the Cayley graph.

The vertex correspondence is the canonical bijection (same ids), so the
density clause of a quasi-isometry holds with constant 0 and the work is
in the four directed edge-distance checks:

  (a) every vertical edge is a Cayley edge;
  (b) endpoints of a horizontal edge are less than 2*delta + 2 apart;
  (c) a same-level Cayley edge forces a horizontal edge;
  (d) a level-changing Cayley edge maps to distance <= 2 (via the upper
      endpoint's predecessor).

Checks quantify over the levels where horizontal-edge data is complete.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .subdivision import SubdivisionGraph


@dataclass
class QiCheck:
    name: str
    description: str
    domain_size: int
    max_observed: float | None
    bound: float | None
    passed: bool
    witness: tuple | None = None


@dataclass
class QiReport:
    checks: list[QiCheck]
    empirical_k: float | None
    extremal_pair: tuple[int, int] | None
    pairs_sampled: int
    exhaustive_pairs: bool

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _trusted_vertices(graph: SubdivisionGraph) -> list[int]:
    ball = graph.ball
    out = []
    for n in range(0, max(graph.n_max, -1) + 1):
        out.extend(ball.spheres[n])
    return out


def _xi_adjacency(graph: SubdivisionGraph) -> dict[int, list[int]]:
    """Unit-length adjacency of the subdivision graph restricted to the
    trusted levels (vertical tree edges plus horizontal edges)."""
    adj: dict[int, list[int]] = {v: [] for v in _trusted_vertices(graph)}
    ball = graph.ball
    for v in adj:
        if v != 0 and ball.parent[v] in adj:
            adj[v].append(ball.parent[v])
            adj[ball.parent[v]].append(v)
    for _, (u, v) in graph.all_level_edges():
        adj[u].append(v)
        adj[v].append(u)
    return adj


def _bfs_distance(adj: dict[int, list[int]], source: int, target: int) -> int:
    if source == target:
        return 0
    seen = {source}
    frontier = [source]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w in seen:
                    continue
                if w == target:
                    return depth
                seen.add(w)
                nxt.append(w)
        frontier = nxt
    raise ValueError("target not reachable in the trusted subdivision graph")


def verify_qi_bounds(graph: SubdivisionGraph, delta: float) -> QiReport:
    ball = graph.ball
    checks: list[QiCheck] = []

    # (a) vertical edges are Cayley edges
    domain = 0
    bad = None
    for e in range(1, ball.size):
        domain += 1
        p = ball.parent[e]
        if ball.neighbors[p].get(ball.last_letter[e]) != e:
            bad = (e, p)
            break
    checks.append(
        QiCheck("a", "vertical edge implies Cayley adjacency", domain, 1 if domain else None, 1, bad is None, bad)
    )

    # (b) horizontal edges stay within 2*delta + 2 in the Cayley graph
    bound_b = 2 * delta + 2
    worst = 0
    bad = None
    domain = 0
    for _, (u, v) in graph.all_level_edges():
        domain += 1
        label = graph.edge_labels.get((u, v))
        if label is not None:
            d = len(label.relative)
        else:
            d = ball.distance_between(u, v, graph.k + 2)
            if d is None:
                d = graph.k + 3
        worst = max(worst, d)
        if d >= bound_b and bad is None:
            bad = (u, v)
    checks.append(
        QiCheck("b", "horizontal edge implies Cayley distance < 2*delta + 2", domain, worst if domain else None, bound_b, bad is None, bad)
    )

    # (c) same-level Cayley edges force horizontal edges
    domain = 0
    bad = None
    edge_sets = {n: set(es) for n, es in graph.level_edges.items()}
    for n in range(1, max(graph.n_max, 0) + 1):
        for u in ball.spheres[n]:
            for w in ball.neighbors[u].values():
                if w > u and ball.sphere_of[w] == n:
                    domain += 1
                    if (u, w) not in edge_sets.get(n, set()):
                        bad = (u, w)
    checks.append(
        QiCheck("c", "same-level Cayley edge implies horizontal edge", domain, None, None, bad is None, bad)
    )

    # (d) level-changing Cayley edges map to distance <= 2
    domain = 0
    worst = 0
    bad = None
    for n in range(1, max(graph.n_max, -1) + 2):
        if n > ball.radius:
            break
        for u in ball.spheres[n]:
            p = ball.parent[u]
            for w in ball.neighbors[u].values():
                if ball.sphere_of[w] != n - 1:
                    continue
                domain += 1
                if w == p:
                    worst = max(worst, 1)
                    continue
                if (min(p, w), max(p, w)) in graph.witnesses:
                    worst = max(worst, 2)
                else:
                    bad = (u, w)
                    worst = max(worst, 3)
    checks.append(
        QiCheck("d", "level-changing Cayley edge maps to distance <= 2", domain, worst if domain else None, 2, bad is None, bad)
    )

    # density clause: the correspondence is a bijection on trusted levels
    trusted = _trusted_vertices(graph)
    checks.append(
        QiCheck("density", "identity correspondence is a distance-0 cover", len(trusted), 0, 0, True)
    )

    return QiReport(checks, None, None, 0, False)


def _pair_constant(d_cayley: int, d_xi: int) -> float:
    """Least K >= 1 with d_cayley/K - K <= d_xi <= K*d_cayley + K."""
    upper = d_xi / (d_cayley + 1)
    lower = (-d_xi + math.sqrt(d_xi * d_xi + 4 * d_cayley)) / 2
    return max(1.0, upper, lower)


def estimate_qi_constants(
    graph: SubdivisionGraph, sample_pairs: int = 2000, seed: int = 0
) -> tuple[float | None, tuple[int, int] | None, int, bool]:
    """Empirical QI constant over sampled trusted vertex pairs under the
    identity correspondence; returns (K, extremal pair, pairs used,
    exhaustive flag)."""
    ball = graph.ball
    trusted = _trusted_vertices(graph)
    if len(trusted) < 2:
        return None, None, 0, True
    all_pairs = len(trusted) * (len(trusted) - 1) // 2
    exhaustive = all_pairs <= sample_pairs
    if exhaustive:
        pairs = [
            (trusted[i], trusted[j])
            for i in range(len(trusted))
            for j in range(i + 1, len(trusted))
        ]
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(sample_pairs):
            u = rng.choice(trusted)
            v = rng.choice(trusted)
            while v == u:
                v = rng.choice(trusted)
            pairs.append((u, v))
    adj = _xi_adjacency(graph)
    best = 0.0
    extremal = None
    limit = 2 * max(graph.n_max, 0) + 2
    for u, v in pairs:
        d_x = ball.distance_between(u, v, limit)
        if d_x is None:
            raise ValueError("Cayley distance exceeded its in-ball limit")
        d_y = _bfs_distance(adj, u, v)
        k = _pair_constant(d_x, d_y)
        if k > best:
            best = k
            extremal = (u, v)
    return best, extremal, len(pairs), exhaustive

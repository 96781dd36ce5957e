"""Thin-triangle constant estimation on finite balls.

Triangles are anchored: one vertex is the identity and the other two range
over the ball of the check radius r (translation invariance of the Cayley
metric makes this cover every triangle shape of diameter <= r).  For every
triangle, every geodesic realization of every side is enumerated, and the
thinness of a point p on one side is

    min over the other two sides of (max over that side's geodesics of
        d(p, geodesic))

which is exactly the largest deviation any choice of geodesic triple can
exhibit at p.  The reported delta is the maximum over all points; it is a
lower bound for the true constant, since bigger triangles may exist
outside the checked radius.

Distances are measured inside the ball.  A measured distance d(p, v) is
certified exact when (|p| + |v| + d) / 2 <= R, which forces some true
geodesic to stay inside; measurements failing the certificate only ever
overestimate and are flagged so the estimate never silently stops being a
lower bound.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .ball import CayleyBall, GeodesicCapExceeded

MODE_EXHAUSTIVE = "exhaustive-triangles"
MODE_SAMPLED = "sampled-triangles"

DEFAULT_GEODESIC_CAP = 10_000

THREADS_ENV = "SUBFORGE_THREADS"


class _LazyDistances:
    """Per-source BFS layers over the in-ball graph, expanded on demand."""

    def __init__(self, ball: CayleyBall):
        self.ball = ball
        self._state: dict[int, tuple[dict[int, int], list[int], list[list[int]]]] = {}

    def _entry(self, source: int):
        st = self._state.get(source)
        if st is None:
            st = ({source: 0}, [source], [[source]])
            self._state[source] = st
        return st

    def expand(self, source: int, depth: int) -> list[list[int]]:
        """Layers of the BFS from ``source`` out to ``depth`` (or until the
        ball is exhausted)."""
        dist, frontier, layers = self._entry(source)
        neighbors = self.ball.neighbors
        while len(layers) - 1 < depth and frontier:
            nxt = []
            d = len(layers)
            for v in frontier:
                for w in neighbors[v].values():
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            layers.append(nxt)
            self._state[source] = (dist, nxt, layers)
            frontier = nxt
        return layers

    def distance(self, source: int, target: int, limit: int) -> int | None:
        dist, _, _ = self._entry(source)
        d = dist.get(target)
        if d is not None:
            return d
        layers = self.expand(source, limit)
        dist, _, _ = self._state[source]
        return dist.get(target)

    def field(self, source: int, depth: int) -> dict[int, int]:
        self.expand(source, depth)
        return self._state[source][0]


def enumerate_pair_geodesics(
    ball: CayleyBall,
    dists: _LazyDistances,
    x: int,
    y: int,
    cap: int | None = None,
    truncate: bool = False,
) -> list[tuple[int, ...]]:
    """All geodesic vertex paths from x to y (deterministic order).

    Valid whenever the true geodesics stay in the ball, which holds for
    the anchored-triangle sides used here.  Past ``cap`` paths this raises,
    or with ``truncate`` stops and returns the first ``cap`` paths.
    """
    field = dists.field(x, 2 * ball.radius)
    d = field.get(y)
    if d is None:
        raise ValueError("pair not connected inside the ball")
    paths: list[tuple[int, ...]] = []
    stack = [y]

    def rec(v: int) -> bool:
        if cap is not None and len(paths) >= cap + (0 if truncate else 1):
            return False
        if v == x:
            paths.append(tuple(reversed(stack)))
            return cap is None or len(paths) <= cap or truncate
        dv = field[v]
        for w in sorted(ball.neighbors[v].values()):
            if field.get(w) == dv - 1:
                stack.append(w)
                more = rec(w)
                stack.pop()
                if not more:
                    return False
        return True

    rec(y)
    if cap is not None and len(paths) > cap:
        raise GeodesicCapExceeded(cap, cap)
    return paths[:cap] if cap is not None else paths


@dataclass(frozen=True)
class TriangleWitness:
    """Triangle (identity, x, y) realizing the reported thinness at
    ``point`` on side ``side`` (0: id-x, 1: id-y, 2: x-y)."""

    x: int
    y: int
    side: int
    point: int
    value: int


@dataclass
class DeltaEstimate:
    delta: float
    radius_checked: int
    mode: str
    witness: TriangleWitness | None
    is_lower_bound: bool = True
    exact_distances: bool = True
    warnings: tuple[str, ...] = ()


def _side_geodesics(ball, dists, x, y, cap, warnings):
    sides = []
    capped = False
    for a, b in ((0, x), (0, y), (x, y)):
        if a == b:
            sides.append([(a,)])
            continue
        try:
            sides.append(enumerate_pair_geodesics(ball, dists, a, b, cap))
        except GeodesicCapExceeded:
            sides.append(enumerate_pair_geodesics(ball, dists, a, b, cap, truncate=True))
            capped = True
            warnings.append(f"geodesic cap {cap} exceeded for pair ({a}, {b})")
    return sides, capped


def _point_thinness(ball, dists, p, other_sides):
    """min over the two other sides of (max over geodesics of d(p, geo)).

    Expands the BFS from p one layer at a time and stops as soon as one
    side has every geodesic hit.  Returns (value, exact_flag).
    """
    targets = [[set(geo) for geo in side] for side in other_sides]
    maxima = [0, 0]
    exact = True
    depth = 0
    while True:
        layers = dists.expand(p, depth)
        if depth >= len(layers):
            raise AssertionError("thinness BFS exhausted the ball")
        layer = set(layers[depth])
        for si in (0, 1):
            remaining = []
            for geo in targets[si]:
                if geo & layer:
                    if depth > maxima[si]:
                        maxima[si] = depth
                    hit = next(iter(geo & layer))
                    if ball.sphere_of[p] + ball.sphere_of[hit] + depth > 2 * ball.radius:
                        exact = False
                else:
                    remaining.append(geo)
            targets[si] = remaining
            if not remaining:
                return maxima[si], exact
        depth += 1


def triangle_thinness(ball, dists, x, y, geo_cap, warnings):
    """Worst thinness value over all points of all sides of the anchored
    triangle (identity, x, y)."""
    sides, capped = _side_geodesics(ball, dists, x, y, geo_cap, warnings)
    best = (-1, None, True)
    for si in range(3):
        others = [sides[(si + 1) % 3], sides[(si + 2) % 3]]
        seen_points = set()
        for geo in sides[si]:
            for p in geo:
                if p in seen_points:
                    continue
                seen_points.add(p)
                value, exact = _point_thinness(ball, dists, p, others)
                if value > best[0]:
                    best = (value, TriangleWitness(x, y, si, p, value), exact)
                elif value == best[0] and not exact:
                    best = (best[0], best[1], best[2] and exact)
    return best[0], best[1], best[2], capped


def _pairs_exhaustive(ball, r):
    ids = [e for e in range(ball.size) if ball.sphere_of[e] <= r]
    for i, x in enumerate(ids):
        for y in ids[i:]:
            yield x, y


def compute_delta(
    ball: CayleyBall,
    r: int,
    mode: str = MODE_EXHAUSTIVE,
    geo_cap: int = DEFAULT_GEODESIC_CAP,
    samples: int = 2000,
    seed: int = 0,
) -> DeltaEstimate:
    """Max thinness over anchored triangles with the two free vertices in
    the ball of radius r.  Requires 2r <= ball.radius so that every side
    geodesic stays inside the ball."""
    if r < 0:
        raise ValueError("delta radius must be >= 0")
    if 2 * r > ball.radius:
        raise ValueError(f"delta radius {r} needs ball radius >= {2 * r}")
    warnings: list[str] = []
    if mode == MODE_EXHAUSTIVE:
        pairs = list(_pairs_exhaustive(ball, r))
    else:
        rng = random.Random(seed)
        ids = [e for e in range(ball.size) if ball.sphere_of[e] <= r]
        pairs = [(rng.choice(ids), rng.choice(ids)) for _ in range(samples)]

    threads = max(1, int(os.environ.get(THREADS_ENV, "1") or "1"))

    def eval_chunk(chunk):
        local = _LazyDistances(ball)
        local_warnings: list[str] = []
        best = (-1, None, True, False)
        for x, y in chunk:
            value, witness, exact, capped = triangle_thinness(ball, local, x, y, geo_cap, local_warnings)
            if value > best[0]:
                best = (value, witness, exact and best[2], capped or best[3])
            else:
                best = (best[0], best[1], best[2] and exact, best[3] or capped)
        return best, local_warnings

    if threads == 1 or len(pairs) < 64:
        results = [eval_chunk(pairs)]
    else:
        step = (len(pairs) + threads - 1) // threads
        chunks = [pairs[i : i + step] for i in range(0, len(pairs), step)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(eval_chunk, chunks))

    value, witness, exact, capped = -1, None, True, False
    for (v, w, ex, cp), local_warnings in results:
        warnings.extend(local_warnings)
        if v > value:
            value, witness = v, w
        exact = exact and ex
        capped = capped or cp
    final_mode = mode if not capped else MODE_SAMPLED
    if capped:
        warnings.append("downgraded to sampled mode: some side exceeded the geodesic cap")
    return DeltaEstimate(
        delta=float(max(value, 0)),
        radius_checked=r,
        mode=final_mode,
        witness=witness,
        exact_distances=exact,
        warnings=tuple(warnings),
    )


def reevaluate_witness(ball: CayleyBall, witness: TriangleWitness, geo_cap=DEFAULT_GEODESIC_CAP) -> int:
    """Recompute the thinness value of a stored witness triangle."""
    dists = _LazyDistances(ball)
    warnings: list[str] = []
    sides, _ = _side_geodesics(ball, dists, witness.x, witness.y, geo_cap, warnings)
    others = [sides[(witness.side + 1) % 3], sides[(witness.side + 2) % 3]]
    value, _ = _point_thinness(ball, dists, witness.point, others)
    return value


def validate_delta(
    ball: CayleyBall,
    delta: float,
    samples: int,
    seed: int = 0,
    r: int | None = None,
    geo_cap: int = DEFAULT_GEODESIC_CAP,
):
    """Sample anchored triangles and check delta-thinness; returns
    (passed, counterexample witness or None)."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if r is None:
        r = ball.radius // 2
    rng = random.Random(seed)
    ids = [e for e in range(ball.size) if ball.sphere_of[e] <= r]
    dists = _LazyDistances(ball)
    warnings: list[str] = []
    for _ in range(samples):
        x, y = rng.choice(ids), rng.choice(ids)
        value, witness, _, _ = triangle_thinness(ball, dists, x, y, geo_cap, warnings)
        if value > delta:
            return False, witness
    return True, None

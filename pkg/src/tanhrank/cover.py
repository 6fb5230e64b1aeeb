"""Uniform point cover, partition, and unit-square-graph clique partition:
transforms between the three perspectives, exact solvers, the optimal 1-D
sweep, and the shared greedy engine.

Convention note: eps is a *radius* in cover operations (each source point
within eps of a covering point) and a *diameter* in partition and clique
operations (pairwise distance within a group at most eps).  A partition of
diameter eps corresponds to a cover of radius eps/2.  Every signature below
states which convention it uses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .params import (
    FORMAT,
    FormatError,
    LimitError,
    Vec,
    _load_document,
    rat,
    rat_str,
    uniform_distance,
    vec,
)
from .proximate import approx_partition

DEFAULT_POINT_LIMIT = 12

Partition = tuple[tuple[int, ...], ...]
Cover = tuple[Vec, ...]


@dataclass(frozen=True)
class PointSet:
    p: int
    points: tuple[Vec, ...]

    def __post_init__(self) -> None:
        if self.p < 1:
            raise FormatError("dimension p must be >= 1")
        for i, x in enumerate(self.points):
            if len(x) != self.p:
                raise FormatError(f"point {i + 1} has dimension {len(x)} != p={self.p}")

    @property
    def h(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CoverInstance:
    """Decision instance: points, eps, and a budget r.  Whether eps is a
    radius or a diameter depends on the problem being decided; the reduction
    pipeline emits diameter-convention instances."""

    points: PointSet
    eps: Fraction
    budget: int

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise FormatError("eps must be positive")


@dataclass(frozen=True)
class UnitSquareGraph:
    n: int
    edges: frozenset[tuple[int, int]]


def make_points(p: int, points: Sequence[Sequence]) -> PointSet:
    return PointSet(p=p, points=tuple(vec(x) for x in points))


def build_graph(points: PointSet, eps: Fraction) -> UnitSquareGraph:
    """Proximity graph at diameter eps: edges between points at uniform
    distance <= eps (closed threshold)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    edges = set()
    for i in range(points.h):
        for j in range(i + 1, points.h):
            if uniform_distance(points.points[i], points.points[j]) <= eps:
                edges.add((i, j))
    return UnitSquareGraph(n=points.h, edges=frozenset(edges))


def verify_partition(points: PointSet, partition: Partition, eps: Fraction) -> bool:
    """True iff the groups partition all indices with pairwise distance
    <= eps (diameter convention)."""
    seen: set[int] = set()
    for g in partition:
        for i in g:
            if i in seen or not 0 <= i < points.h:
                return False
            seen.add(i)
        for x in range(len(g)):
            for y in range(x + 1, len(g)):
                if uniform_distance(points.points[g[x]], points.points[g[y]]) > eps:
                    return False
    return seen == set(range(points.h))


def verify_cover(points: PointSet, cover: Cover, eps: Fraction) -> bool:
    """True iff every source point is within eps (radius) of a covering point."""
    return all(
        any(uniform_distance(x, y) <= eps for y in cover) for x in points.points
    )


def partition_to_cover(points: PointSet, partition: Partition, eps: Fraction) -> Cover:
    """Bounding-box centroids of an (r, eps)-partition form an (r, eps/2)-cover.

    eps is the partition diameter; the returned cover has radius eps/2.
    """
    if not verify_partition(points, partition, eps):
        raise ValueError("not a partition of uniform diameter <= eps")
    cover = []
    for g in partition:
        ys = []
        for q in range(points.p):
            coords = [points.points[i][q] for i in g]
            ys.append(Fraction(max(coords) + min(coords), 2))
        cover.append(tuple(ys))
    return tuple(cover)


def cover_to_partition(points: PointSet, cover: Cover, eps: Fraction) -> Partition:
    """Nearest-covering-point groups of an (r, eps/2)-cover form an
    (r, eps)-partition.  eps is the partition diameter; the cover must have
    radius eps/2.  Nearest-point ties go to the lowest covering index."""
    half = Fraction(eps, 2)
    groups: list[list[int]] = [[] for _ in cover]
    for i, x in enumerate(points.points):
        dists = [uniform_distance(x, y) for y in cover]
        best = min(dists, default=None)
        if best is None or best > half:
            raise ValueError(f"point {i + 1} is not covered at radius eps/2")
        groups[dists.index(best)].append(i)
    return tuple(tuple(g) for g in groups if g)


def solve_upp_exact(
    points: PointSet, eps: Fraction, point_limit: int = DEFAULT_POINT_LIMIT
) -> Partition:
    """Minimum-size partition into groups of uniform diameter <= eps
    (diameter convention), by branch and bound over set partitions."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if points.h > point_limit:
        raise LimitError(f"h={points.h} exceeds point limit {point_limit}")
    h = points.h
    if h == 0:
        return ()
    near = [
        [
            uniform_distance(points.points[i], points.points[j]) <= eps
            for j in range(h)
        ]
        for i in range(h)
    ]
    best: list[Partition] = [greedy_upp(points, eps)]

    groups: list[list[int]] = []

    def place(i: int) -> None:
        if len(groups) >= len(best[0]):
            return
        if i == h:
            best[0] = tuple(tuple(g) for g in groups)
            return
        for g in groups:
            if all(near[i][j] for j in g):
                g.append(i)
                place(i + 1)
                g.pop()
        groups.append([i])
        place(i + 1)
        groups.pop()

    place(0)
    return best[0]


def clique_partition_exact(
    graph: UnitSquareGraph, limit: int = DEFAULT_POINT_LIMIT
) -> Partition:
    """Minimum clique partition of a graph, by branch and bound over the
    adjacency structure only."""
    if graph.n > limit:
        raise LimitError(f"graph has {graph.n} vertices, limit {limit}")
    adj = [[False] * graph.n for _ in range(graph.n)]
    for i, j in graph.edges:
        adj[i][j] = adj[j][i] = True
    best: list[Partition] = [tuple((i,) for i in range(graph.n))]
    groups: list[list[int]] = []

    def place(i: int) -> None:
        if len(groups) >= len(best[0]):
            return
        if i == graph.n:
            best[0] = tuple(tuple(g) for g in groups)
            return
        for g in groups:
            if all(adj[i][j] for j in g):
                g.append(i)
                place(i + 1)
                g.pop()
        groups.append([i])
        place(i + 1)
        groups.pop()

    place(0)
    return best[0]


def solve_scalar_cover(
    eps: Fraction, scalars: Sequence[Fraction]
) -> tuple[Fraction, ...]:
    """Optimal 1-D cover at radius eps: sweep sorted scalars, opening a new
    covering scalar at x+eps whenever x escapes the last one.  The output is
    a cover of minimum size."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    ys: list[Fraction] = []
    for x in sorted(scalars):
        if not ys or x > ys[-1] + eps:
            ys.append(x + eps)
    return tuple(ys)


def greedy_upp(points: PointSet, eps: Fraction) -> Partition:
    """Greedy partition at diameter eps: shared engine with the proximate
    module, run at starter radius eps/2 so groups have diameter <= eps."""
    groups, _ = approx_partition(Fraction(eps, 2), points.points)
    return groups


# --- JSON -------------------------------------------------------------------


def points_to_json(points: PointSet) -> str:
    doc = {
        "format": FORMAT,
        "p": points.p,
        "points": [[rat_str(x) for x in pt] for pt in points.points],
    }
    return json.dumps(doc, indent=2) + "\n"


def points_from_json(text: str) -> PointSet:
    doc = _load_document(text)
    try:
        return PointSet(p=int(doc["p"]), points=tuple(vec(x) for x in doc["points"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed point-set document: {e}") from e


def instance_to_json(inst: CoverInstance) -> str:
    doc = {
        "format": FORMAT,
        "p": inst.points.p,
        "points": [[rat_str(x) for x in pt] for pt in inst.points.points],
        "eps": rat_str(inst.eps),
        "r": inst.budget,
    }
    return json.dumps(doc, indent=2) + "\n"


def instance_from_json(text: str) -> CoverInstance:
    doc = _load_document(text)
    try:
        points = PointSet(p=int(doc["p"]), points=tuple(vec(x) for x in doc["points"]))
        return CoverInstance(points=points, eps=rat(doc["eps"]), budget=int(doc["r"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed cover-instance document: {e}") from e


def partition_to_json(partition: Partition) -> str:
    doc = {
        "format": FORMAT,
        "groups": [[i + 1 for i in g] for g in partition],
    }
    return json.dumps(doc, indent=2) + "\n"


def partition_from_json(text: str) -> Partition:
    doc = _load_document(text)
    try:
        groups = tuple(tuple(int(i) - 1 for i in g) for g in doc["groups"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed partition document: {e}") from e
    if any(i < 0 for g in groups for i in g):
        raise FormatError("partition point indices are 1-based")
    return groups


def cover_points_to_json(cover: Cover) -> str:
    doc = {
        "format": FORMAT,
        "points": [[rat_str(x) for x in pt] for pt in cover],
    }
    return json.dumps(doc, indent=2) + "\n"


def cover_points_from_json(text: str) -> Cover:
    doc = _load_document(text)
    try:
        return tuple(vec(x) for x in doc["points"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed cover document: {e}") from e

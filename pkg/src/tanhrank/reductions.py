"""Executable hardness reductions with independent brute-force oracles.

Three reductions are provided:

* point-cover instances to bounded-proximate-rank instances (unit per source
  point, translated coordinates as incoming weight and bias);
* subset sum to proper-subset-sum-zero to biasless bounded proximate rank
  (n^2 units in n incoming-weight groups, cycled outgoing weights);
* restricted satisfiability to uniform point partition via grid layouts,
  tiles, and the gadget library, together with the certificate-carrying
  round trips between satisfying assignments and point partitions.

Grid layouts are inputs, validated against the formula; the reduction never
computes an embedding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .cover import CoverInstance, Partition, PointSet, solve_upp_exact, verify_partition
from .gadgets import (
    GADGET_EPS,
    Gadget,
    build_library,
    check_gadget,
    gadget_partition,
)
from .params import (
    FORMAT,
    BiaslessParameter,
    BiaslessUnit,
    FormatError,
    LimitError,
    Parameter,
    Unit,
    Vec,
    _load_document,
    rat,
    rat_str,
)
from .proximate import ParCertificate

Cell = tuple[int, int]

MAX_SAT_VARS = 20
MAX_SSZ_INTEGERS = 15
MAX_COVER_POINTS = 12


@dataclass(frozen=True)
class RestrictedFormula:
    """CNF with 2-3 literals per clause and 2-3 occurrences per variable,
    exactly one of them negative; literals are signed 1-based indices."""

    n: int
    clauses: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class GridLayout:
    """Planar rectilinear integer embedding of the incidence graph.

    Each path runs from its variable vertex to its clause vertex through
    axis-aligned unit steps; strictly interior cells belong to that path
    alone.
    """

    variable_pos: tuple[Cell, ...]
    clause_pos: tuple[Cell, ...]
    paths: tuple[tuple[int, int, tuple[Cell, ...]], ...]  # (var, clause, cells), 1-based


@dataclass(frozen=True)
class SsumInstance:
    x: tuple[int, ...]
    target: int


@dataclass(frozen=True)
class SszInstance:
    x: tuple[int, ...]


@dataclass(frozen=True)
class Tile:
    kind: str
    directions: tuple[str, ...]
    negative: str | None


_DIR_OF_STEP = {(1, 0): "E", (-1, 0): "W", (0, 1): "N", (0, -1): "S"}
_STEP_OF_DIR = {d: s for s, d in _DIR_OF_STEP.items()}


# --- formula / layout validation ---------------------------------------------


def formula_errors(f: RestrictedFormula) -> list[str]:
    errors = []
    occurrences: dict[int, list[int]] = {v: [] for v in range(1, f.n + 1)}
    for j, clause in enumerate(f.clauses, start=1):
        if len(clause) not in (2, 3):
            errors.append(f"clause {j} has {len(clause)} literals, need 2 or 3")
        seen = set()
        for lit in clause:
            v = abs(lit)
            if lit == 0 or v > f.n:
                errors.append(f"clause {j} has invalid literal {lit}")
                continue
            if v in seen:
                errors.append(f"clause {j} mentions variable {v} twice")
            seen.add(v)
            occurrences[v].append(lit)
    for v, occ in occurrences.items():
        if len(occ) not in (2, 3):
            errors.append(f"variable {v} occurs in {len(occ)} clauses, need 2 or 3")
        negs = sum(1 for lit in occ if lit < 0)
        if negs != 1:
            errors.append(f"variable {v} has {negs} negative occurrences, need exactly 1")
    return errors


def layout_errors(f: RestrictedFormula, layout: GridLayout) -> list[str]:
    """Structural mismatches between formula and layout, with locations."""
    errors = formula_errors(f)
    if len(layout.variable_pos) != f.n:
        errors.append(f"layout has {len(layout.variable_pos)} variable positions, need {f.n}")
    if len(layout.clause_pos) != f.m:
        errors.append(f"layout has {len(layout.clause_pos)} clause positions, need {f.m}")
    vertex_cells = list(layout.variable_pos) + list(layout.clause_pos)
    if len(set(vertex_cells)) != len(vertex_cells):
        errors.append("vertex positions are not distinct")
    if errors:
        return errors

    incidences = {
        (abs(lit), j)
        for j, clause in enumerate(f.clauses, start=1)
        for lit in clause
    }
    path_edges = [(v, c) for v, c, _ in layout.paths]
    if sorted(path_edges) != sorted(incidences):
        errors.append("paths do not match the formula's incidence edges")
        return errors

    vertex_set = set(vertex_cells)
    interior_owner: dict[Cell, tuple[int, int]] = {}
    for v, c, cells in layout.paths:
        if len(cells) < 2:
            errors.append(f"path v{v}-c{c} has fewer than 2 cells")
            continue
        if cells[0] != layout.variable_pos[v - 1]:
            errors.append(f"path v{v}-c{c} does not start at v{v}")
        if cells[-1] != layout.clause_pos[c - 1]:
            errors.append(f"path v{v}-c{c} does not end at c{c}")
        for a, b in zip(cells, cells[1:]):
            if (b[0] - a[0], b[1] - a[1]) not in _DIR_OF_STEP:
                errors.append(f"path v{v}-c{c} has a non-unit step {a}->{b}")
        for cell in cells[1:-1]:
            if cell in vertex_set:
                errors.append(f"path v{v}-c{c} passes through vertex cell {cell}")
            if cell in interior_owner:
                ov, oc = interior_owner[cell]
                errors.append(
                    f"path v{v}-c{c} overlaps path v{ov}-c{oc} at cell {cell}"
                )
            interior_owner[cell] = (v, c)
        if len(set(cells)) != len(cells):
            errors.append(f"path v{v}-c{c} revisits a cell")
    return errors


def validate_formula(f: RestrictedFormula, layout: GridLayout) -> bool:
    """True iff the occurrence/clause-size conditions hold and the layout is
    a valid embedding of the incidence graph (planarity witness)."""
    return not layout_errors(f, layout)


# --- tiles --------------------------------------------------------------------


def build_tile_map(f: RestrictedFormula, layout: GridLayout) -> dict[Cell, Tile]:
    """Type every occupied cell from the layout, deterministically."""
    errors = layout_errors(f, layout)
    if errors:
        raise ValueError("invalid formula/layout: " + "; ".join(errors))
    polarity = {
        (abs(lit), j): lit > 0
        for j, clause in enumerate(f.clauses, start=1)
        for lit in clause
    }
    var_dirs: dict[int, dict[str, bool]] = {v: {} for v in range(1, f.n + 1)}
    clause_dirs: dict[int, list[str]] = {j: [] for j in range(1, f.m + 1)}
    tiles: dict[Cell, Tile] = {}
    for v, c, cells in sorted(layout.paths):
        first = _DIR_OF_STEP[(cells[1][0] - cells[0][0], cells[1][1] - cells[0][1])]
        last = _DIR_OF_STEP[
            (cells[-2][0] - cells[-1][0], cells[-2][1] - cells[-1][1])
        ]
        var_dirs[v][first] = polarity[(v, c)]
        clause_dirs[c].append(last)
        for idx in range(1, len(cells) - 1):
            prev_d = _DIR_OF_STEP[
                (cells[idx - 1][0] - cells[idx][0], cells[idx - 1][1] - cells[idx][1])
            ]
            next_d = _DIR_OF_STEP[
                (cells[idx + 1][0] - cells[idx][0], cells[idx + 1][1] - cells[idx][1])
            ]
            dirs = tuple(sorted((prev_d, next_d), key="NESW".index))
            tiles[cells[idx]] = Tile(kind="edge", directions=dirs, negative=None)
    for v in range(1, f.n + 1):
        dirs = var_dirs[v]
        negative = [d for d, pos in dirs.items() if not pos]
        tiles[layout.variable_pos[v - 1]] = Tile(
            kind="variable",
            directions=tuple(sorted(dirs, key="NESW".index)),
            negative=negative[0],
        )
    for j in range(1, f.m + 1):
        tiles[layout.clause_pos[j - 1]] = Tile(
            kind="clause",
            directions=tuple(sorted(clause_dirs[j], key="NESW".index)),
            negative=None,
        )
    return tiles


_ALLOCATION = {("edge", 2): 2, ("variable", 2): 2, ("variable", 3): 3,
               ("clause", 2): 2, ("clause", 3): 3}

_checked_gadgets: set[str] = set()


@dataclass
class _Reduced:
    """Reduced instance plus the bookkeeping needed for certificate round
    trips: which global point indices belong to which tile, and where each
    path's boundary points sit."""

    f: RestrictedFormula
    layout: GridLayout
    tiles: dict[Cell, Tile]
    gadgets: dict[Cell, Gadget]
    interior_index: dict[Cell, list[int]]
    boundary_of: dict[tuple[Cell, str], int]
    path_cells: dict[tuple[int, int], tuple[Cell, ...]]
    instance: CoverInstance


def _tile_origin(cell: Cell) -> Vec:
    return (Fraction(2 * cell[0] - 1, 2), Fraction(2 * cell[1] - 1, 2))


def _build_reduced(f: RestrictedFormula, layout: GridLayout) -> _Reduced:
    tiles = build_tile_map(f, layout)
    library = build_library()
    gadgets: dict[Cell, Gadget] = {}
    for cell in sorted(tiles):
        tile = tiles[cell]
        g = library[(tile.kind, frozenset(tile.directions), tile.negative)]
        if g.name not in _checked_gadgets:
            report = check_gadget(g)
            if not report.ok:
                raise ValueError(f"gadget {g.name} fails its contract")
            _checked_gadgets.add(g.name)
        gadgets[cell] = g

    points: list[Vec] = []
    interior_index: dict[Cell, list[int]] = {}
    for cell in sorted(tiles):
        ox, oy = _tile_origin(cell)
        idxs = []
        for p in gadgets[cell].interior:
            idxs.append(len(points))
            points.append((ox + p[0], oy + p[1]))
        interior_index[cell] = idxs

    boundary_of: dict[tuple[Cell, str], int] = {}
    midpoints: list[tuple[Vec, Cell, Cell]] = []
    for v, c, cells in sorted(layout.paths):
        for a, b in zip(cells, cells[1:]):
            mid = (Fraction(a[0] + b[0], 2), Fraction(a[1] + b[1], 2))
            midpoints.append((mid, a, b))
    for mid, a, b in sorted(midpoints):
        idx = len(points)
        points.append(mid)
        da = _DIR_OF_STEP[(b[0] - a[0], b[1] - a[1])]
        db = _DIR_OF_STEP[(a[0] - b[0], a[1] - b[1])]
        boundary_of[(a, da)] = idx
        boundary_of[(b, db)] = idx

    r = sum(_ALLOCATION[(t.kind, len(t.directions))] for t in tiles.values())
    instance = CoverInstance(
        points=PointSet(p=2, points=tuple(points)), eps=GADGET_EPS, budget=r
    )
    path_cells = {(v, c): tuple(cells) for v, c, cells in layout.paths}
    return _Reduced(
        f=f,
        layout=layout,
        tiles=tiles,
        gadgets=gadgets,
        interior_index=interior_index,
        boundary_of=boundary_of,
        path_cells=path_cells,
        instance=instance,
    )


def xsat_to_upp(f: RestrictedFormula, layout: GridLayout) -> CoverInstance:
    """Reduce a restricted formula to a uniform point partition instance
    (eps = 1/4 is a diameter; affirmative iff the formula is satisfiable)."""
    return _build_reduced(f, layout).instance


# --- assignment/partition round trips -----------------------------------------


def _clause_satisfied(clause: tuple[int, ...], assignment: Sequence[bool]) -> bool:
    return any(
        (lit > 0 and assignment[lit - 1]) or (lit < 0 and not assignment[-lit - 1])
        for lit in clause
    )


def satisfies(f: RestrictedFormula, assignment: Sequence[bool]) -> bool:
    if len(assignment) != f.n:
        raise ValueError(f"assignment has length {len(assignment)}, need {f.n}")
    return all(_clause_satisfied(c, assignment) for c in f.clauses)


def assignment_to_partition(
    f: RestrictedFormula, layout: GridLayout, assignment: Sequence[bool]
) -> Partition:
    """Partition of the reduced instance from a satisfying assignment.

    Variable tiles include their positive boundary points when true (the
    negative one when false); edge tiles propagate the included side along
    each path; clause tiles pick up whatever remains.
    """
    if not satisfies(f, assignment):
        raise ValueError("assignment does not satisfy the formula")
    red = _build_reduced(f, layout)
    polarity = {
        (abs(lit), j): lit > 0
        for j, clause in enumerate(f.clauses, start=1)
        for lit in clause
    }

    include: dict[Cell, set[str]] = {cell: set() for cell in red.tiles}
    clause_incoming: dict[int, set[str]] = {j: set() for j in range(1, f.m + 1)}
    for (v, c), cells in sorted(red.path_cells.items()):
        active = polarity[(v, c)] == bool(assignment[v - 1])
        steps = list(zip(cells, cells[1:]))
        if active:
            # Every tile along the path, variable included, claims the
            # boundary point ahead of it.
            for a, b in steps:
                include[a].add(_DIR_OF_STEP[(b[0] - a[0], b[1] - a[1])])
            last_a, last_b = steps[-1]
            clause_incoming[c].add(
                _DIR_OF_STEP[(last_a[0] - last_b[0], last_a[1] - last_b[1])]
            )
        else:
            # Claims run the other way, from the clause back to the variable.
            for a, b in steps:
                include[b].add(_DIR_OF_STEP[(a[0] - b[0], a[1] - b[1])])

    groups: list[tuple[int, ...]] = []
    for cell in sorted(red.tiles):
        tile = red.tiles[cell]
        if tile.kind == "clause":
            want = set(tile.directions) - clause_incoming[_clause_at(red, cell)]
            if include[cell] != want:
                raise ValueError("inconsistent clause propagation")
        local = gadget_partition(red.gadgets[cell], include[cell])
        for group in local:
            out = []
            for tag, item in group:
                if tag == "interior":
                    out.append(red.interior_index[cell][item])
                else:
                    out.append(red.boundary_of[(cell, item)])
            groups.append(tuple(sorted(out)))
    partition = tuple(sorted(groups))
    if len(partition) > red.instance.budget or not verify_partition(
        red.instance.points, partition, red.instance.eps
    ):
        raise ValueError("constructed partition failed verification")
    return partition


def _clause_at(red: _Reduced, cell: Cell) -> int:
    return red.layout.clause_pos.index(cell) + 1


def partition_to_assignment(
    f: RestrictedFormula, layout: GridLayout, partition: Partition
) -> tuple[bool, ...]:
    """Satisfying assignment recovered from a valid (r, 1/4)-partition.

    A variable reads as true when a positive boundary point shares a group
    with its tile's interior, false when the negative one does; untouched
    variables default to false.
    """
    red = _build_reduced(f, layout)
    if len(partition) > red.instance.budget or not verify_partition(
        red.instance.points, partition, red.instance.eps
    ):
        raise ValueError("not a valid partition of the reduced instance")
    group_of: dict[int, int] = {}
    for gi, group in enumerate(partition):
        for i in group:
            group_of[i] = gi

    assignment = [False] * f.n
    for v in range(1, f.n + 1):
        cell = layout.variable_pos[v - 1]
        tile = red.tiles[cell]
        interior = set(red.interior_index[cell])
        included = {
            d
            for d in tile.directions
            if any(
                i in interior
                for i in partition[group_of[red.boundary_of[(cell, d)]]]
            )
        }
        positives = included - {tile.negative}
        if positives and tile.negative in included:
            raise ValueError(f"variable {v} includes both polarities")
        assignment[v - 1] = bool(positives)
    if not satisfies(f, tuple(assignment)):
        raise ValueError("partition does not induce a satisfying assignment")
    return tuple(assignment)


# --- the other reductions -------------------------------------------------------


def upc_to_par(instance: CoverInstance) -> tuple[Parameter, Fraction, int]:
    """Point cover (radius eps) to bounded proximate rank: one unit per
    source point, coordinates translated 2*eps into the positive quadrant."""
    pts = instance.points
    if pts.p != 2:
        raise ValueError("upc_to_par expects 2-dimensional points")
    eps = instance.eps
    if pts.h == 0:
        w = Parameter(n=1, m=1, units=(), d=(Fraction(0),))
        return w, eps, instance.budget
    xmin = min(x[0] for x in pts.points)
    ymin = min(x[1] for x in pts.points)
    units = tuple(
        Unit(
            a=(2 * eps,),
            b=(x[0] - xmin + 2 * eps,),
            c=x[1] - ymin + 2 * eps,
        )
        for x in pts.points
    )
    w = Parameter(n=1, m=1, units=units, d=(Fraction(0),))
    return w, eps, instance.budget


def ssum_to_ssz(instance: SsumInstance) -> SszInstance:
    """Subset sum to proper subset sum zero by appending -T; the full-sum
    special case returns a canonical affirmative instance."""
    if any(x <= 0 for x in instance.x) or instance.target <= 0:
        raise ValueError("subset sum instances use positive integers")
    if sum(instance.x) == instance.target:
        return SszInstance(x=(1, -1, 2))
    return SszInstance(x=instance.x + (-instance.target,))


def _mod1(i: int, n: int) -> int:
    return (i - 1) % n + 1


def ssz_to_upar(instance: SszInstance) -> tuple[BiaslessParameter, Fraction, int]:
    """Proper subset sum zero to biasless bounded proximate rank.

    n groups of n units; group i carries the integers cycled to start at x_i,
    scaled by n, over incoming weights evenly spaced in [2i-1, 2i];
    eps = (n-2)/(2(n-1)) merges at most n-1 units of one group; r = 2n-1.
    """
    n = len(instance.x)
    if n < 2:
        raise ValueError("ssz_to_upar needs at least 2 integers")
    if any(x == 0 for x in instance.x):
        raise ValueError("ssz instances use nonzero integers")
    units = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            a = Fraction(n * instance.x[_mod1(i + j - 1, n) - 1])
            b = Fraction(2 * i - 1) + Fraction(j - 1, n - 1)
            units.append(BiaslessUnit(a=a, b=b))
    eps = Fraction(n - 2, 2 * (n - 1))
    return BiaslessParameter(units=tuple(units)), eps, 2 * n - 1


def ssz_witness_certificate(instance: SszInstance, subset: Iterable[int]) -> ParCertificate:
    """Certificate for the reduced instance from a zero-sum proper subset
    (1-based indices): split one group along the subset, split every other
    group as first n-1 units plus the last."""
    n = len(instance.x)
    s = set(subset)
    if not s or s == set(range(1, n + 1)) or not s <= set(range(1, n + 1)):
        raise ValueError("subset must be a nonempty proper subset of 1..n")
    if sum(instance.x[k - 1] for k in s) != 0:
        raise ValueError("subset does not sum to zero")
    pick = next(i for i in sorted(s) if _mod1(i - 1, n) not in s)
    flat = lambda i, j: (i - 1) * n + (j - 1)
    groups: list[tuple[int, ...]] = []
    for i in range(1, n + 1):
        if i == pick:
            si = [j for j in range(1, n + 1) if _mod1(i + j - 1, n) in s]
            rest = [j for j in range(1, n + 1) if j not in si]
            groups.append(tuple(flat(i, j) for j in si))
            groups.append(tuple(flat(i, j) for j in rest))
        else:
            groups.append(tuple(flat(i, j) for j in range(1, n)))
            groups.append((flat(i, n),))
    return ParCertificate(groups=tuple(groups))


# --- brute-force oracles ---------------------------------------------------------


def brute_sat(f: RestrictedFormula, var_limit: int = MAX_SAT_VARS) -> bool:
    return brute_sat_assignment(f, var_limit) is not None


def brute_sat_assignment(
    f: RestrictedFormula, var_limit: int = MAX_SAT_VARS
) -> tuple[bool, ...] | None:
    """First satisfying assignment in lexicographic order, or None."""
    if f.n > var_limit:
        raise LimitError(f"{f.n} variables exceeds limit {var_limit}")
    for bits in product((False, True), repeat=f.n):
        if satisfies(f, bits):
            return bits
    return None


def brute_ssz(x: Sequence[int], limit: int = MAX_SSZ_INTEGERS) -> bool:
    if len(x) > limit:
        raise LimitError(f"{len(x)} integers exceeds limit {limit}")
    for size in range(1, len(x)):
        for s in combinations(range(len(x)), size):
            if sum(x[i] for i in s) == 0:
                return True
    return False


def brute_subset_sum(x: Sequence[int], target: int, limit: int = MAX_SSZ_INTEGERS) -> bool:
    if len(x) > limit:
        raise LimitError(f"{len(x)} integers exceeds limit {limit}")
    for size in range(len(x) + 1):
        for s in combinations(range(len(x)), size):
            if sum(x[i] for i in s) == target:
                return True
    return False


def brute_cover(
    points: PointSet, eps: Fraction, r: int, point_limit: int = MAX_COVER_POINTS
) -> bool:
    """Exhaustive (r, eps)-cover decision (radius convention), via minimum
    partition at diameter 2*eps."""
    return len(solve_upp_exact(points, 2 * eps, point_limit)) <= r


# --- JSON ------------------------------------------------------------------------


def formula_to_json(f: RestrictedFormula) -> str:
    doc = {"format": FORMAT, "n": f.n, "clauses": [list(c) for c in f.clauses]}
    return json.dumps(doc, indent=2) + "\n"


def formula_from_json(text: str) -> RestrictedFormula:
    doc = _load_document(text)
    try:
        return RestrictedFormula(
            n=int(doc["n"]),
            clauses=tuple(tuple(int(l) for l in c) for c in doc["clauses"]),
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed formula document: {e}") from e


def layout_to_json(layout: GridLayout) -> str:
    vertices = {}
    for i, cell in enumerate(layout.variable_pos, start=1):
        vertices[f"v{i}"] = list(cell)
    for j, cell in enumerate(layout.clause_pos, start=1):
        vertices[f"c{j}"] = list(cell)
    doc = {
        "format": FORMAT,
        "vertices": vertices,
        "paths": [
            {"variable": v, "clause": c, "cells": [list(x) for x in cells]}
            for v, c, cells in layout.paths
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def layout_from_json(text: str) -> GridLayout:
    doc = _load_document(text)
    try:
        vertices = {k: (int(x), int(y)) for k, (x, y) in doc["vertices"].items()}
        nv = sum(1 for k in vertices if k.startswith("v"))
        nc = sum(1 for k in vertices if k.startswith("c"))
        variable_pos = tuple(vertices[f"v{i}"] for i in range(1, nv + 1))
        clause_pos = tuple(vertices[f"c{j}"] for j in range(1, nc + 1))
        paths = tuple(
            (
                int(p["variable"]),
                int(p["clause"]),
                tuple((int(x), int(y)) for x, y in p["cells"]),
            )
            for p in doc["paths"]
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed layout document: {e}") from e
    return GridLayout(variable_pos=variable_pos, clause_pos=clause_pos, paths=paths)


def ssz_to_json(inst: SszInstance) -> str:
    return json.dumps({"format": FORMAT, "x": list(inst.x)}, indent=2) + "\n"


def ssz_from_json(text: str) -> SszInstance:
    doc = _load_document(text)
    try:
        return SszInstance(x=tuple(int(v) for v in doc["x"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed ssz document: {e}") from e


def ssum_from_json(text: str) -> SsumInstance:
    doc = _load_document(text)
    try:
        return SsumInstance(x=tuple(int(v) for v in doc["x"]), target=int(doc["T"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed subset-sum document: {e}") from e


def ssum_to_json(inst: SsumInstance) -> str:
    return json.dumps({"format": FORMAT, "x": list(inst.x), "T": inst.target}, indent=2) + "\n"


# --- bundled formula/layout fixtures ----------------------------------------------


def load_bundled(name: str) -> tuple[RestrictedFormula, GridLayout]:
    """Load a shipped formula/layout pair ('phi1', 'phi2', or 'phi3')."""
    text = resources.files("tanhrank.data").joinpath(f"{name}.json").read_text()
    doc = json.loads(text)
    f = formula_from_json(json.dumps(doc["formula"]))
    layout = layout_from_json(json.dumps(doc["layout"]))
    return f, layout

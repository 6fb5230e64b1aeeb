"""Tile gadget library for the satisfiability-to-point-partition reduction,
plus the exhaustive gadget contract checker.

Each gadget is an arrangement of interior points in tile-local coordinates
(the unit square, interior confined to [1/4, 3/4]^2 so groups can never span
two tiles) together with boundary points at edge midpoints.  The checker is
the source of truth for a gadget's behaviour: it enumerates every partition
of the interior (plus each subset of boundary points) at diameter 1/4 and
compares the realizable boundary subsets against the contract for the
gadget's role:

  edge    -- either boundary point alone, never both
  variable-- the negative point alone, or all positive points together
  clause  -- every proper subset of the boundary points, never all of them

A boundary subset S is realizable when the interior plus S admits a
partition into the gadget's allocated number of groups.  Realizability is
monotone under removing boundary points, so the family is determined by its
maximal elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

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

GADGET_EPS = Fraction(1, 4)
MAX_INTERIOR = 10

DIRECTIONS = ("N", "E", "S", "W")

BOUNDARY_MIDPOINT: dict[str, Vec] = {
    "N": (Fraction(1, 2), Fraction(1)),
    "E": (Fraction(1), Fraction(1, 2)),
    "S": (Fraction(1, 2), Fraction(0)),
    "W": (Fraction(0), Fraction(1, 2)),
}


@dataclass(frozen=True)
class Gadget:
    name: str
    kind: str  # 'edge' | 'variable' | 'clause'
    r: int
    directions: tuple[str, ...]
    negative: str | None
    interior: tuple[Vec, ...]

    @property
    def boundary(self) -> dict[str, Vec]:
        return {d: BOUNDARY_MIDPOINT[d] for d in self.directions}

    def key(self) -> tuple:
        return (self.kind, frozenset(self.directions), self.negative)


@dataclass(frozen=True)
class GadgetReport:
    name: str
    ok: bool
    c1_ok: bool
    c2_ok: bool
    realizable: tuple[tuple[str, ...], ...]
    expected: tuple[tuple[str, ...], ...]


# --- partition search helpers ------------------------------------------------


def _partition_exists(points: Sequence[Vec], k: int, eps: Fraction) -> bool:
    return _find_partition(points, k, eps) is not None


def _find_partition(
    points: Sequence[Vec], k: int, eps: Fraction
) -> list[list[int]] | None:
    """First partition of the points into at most k groups of diameter <= eps."""
    n = len(points)
    if n == 0:
        return []
    near = [
        [uniform_distance(points[i], points[j]) <= eps for j in range(n)]
        for i in range(n)
    ]
    groups: list[list[int]] = []

    def place(i: int) -> bool:
        if i == n:
            return True
        for g in groups:
            if all(near[i][j] for j in g):
                g.append(i)
                if place(i + 1):
                    return True
                g.pop()
        if len(groups) < k:
            groups.append([i])
            if place(i + 1):
                return True
            groups.pop()
        return False

    return groups if place(0) else None


def _expected_family(g: Gadget) -> set[frozenset[str]]:
    dirs = list(g.directions)
    if g.kind == "edge":
        return {frozenset()} | {frozenset({d}) for d in dirs}
    if g.kind == "variable":
        positives = [d for d in dirs if d != g.negative]
        fam = {frozenset(), frozenset({g.negative})}
        fam |= {
            frozenset(s)
            for s in _subsets(positives)
        }
        return fam
    if g.kind == "clause":
        return {frozenset(s) for s in _subsets(dirs) if len(s) < len(dirs)}
    raise ValueError(f"unknown gadget kind {g.kind!r}")


def _subsets(items: Sequence[str]) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = [()]
    for x in items:
        out += [s + (x,) for s in out]
    return out


def check_gadget(g: Gadget, eps: Fraction = GADGET_EPS) -> GadgetReport:
    """Exhaustively verify the gadget contract.

    C1: the interior admits no partition into fewer than r groups.
    C2: the realizable boundary subsets equal the role's expected family.
    """
    if len(g.interior) > MAX_INTERIOR:
        raise LimitError(
            f"gadget {g.name} has {len(g.interior)} interior points, limit {MAX_INTERIOR}"
        )
    c1_ok = not _partition_exists(g.interior, g.r - 1, eps)
    realizable: set[frozenset[str]] = set()
    for s in _subsets(list(g.directions)):
        pts = list(g.interior) + [BOUNDARY_MIDPOINT[d] for d in s]
        if _partition_exists(pts, g.r, eps):
            realizable.add(frozenset(s))
    expected = _expected_family(g)
    c2_ok = realizable == expected
    fmt = lambda fam: tuple(
        sorted(tuple(sorted(s)) for s in fam)
    )
    return GadgetReport(
        name=g.name,
        ok=c1_ok and c2_ok,
        c1_ok=c1_ok,
        c2_ok=c2_ok,
        realizable=fmt(realizable),
        expected=fmt(expected),
    )


def gadget_partition(
    g: Gadget, include: Iterable[str], eps: Fraction = GADGET_EPS
) -> list[list[tuple[str, object]]]:
    """Partition of interior plus the given boundary points into r groups.

    Items are tagged ('interior', index) or ('boundary', direction).  Raises
    if the include-set is not realizable.
    """
    dirs = sorted(include)
    pts = list(g.interior) + [BOUNDARY_MIDPOINT[d] for d in dirs]
    found = _find_partition(pts, g.r, eps)
    if found is None:
        raise ValueError(f"boundary subset {dirs} is not realizable for {g.name}")
    ni = len(g.interior)
    return [
        [
            ("interior", i) if i < ni else ("boundary", dirs[i - ni])
            for i in group
        ]
        for group in found
    ]


# --- base geometries and the dihedral closure --------------------------------

_Q = lambda a, b: (Fraction(a), Fraction(b))

# Chain between opposite boundary midpoints; ends 1/4 inside, 1/2 apart.
_STRAIGHT_WE = (_Q("1/4", "1/2"), _Q("1/2", "1/2"), _Q("3/4", "1/2"))
# Chain turning a corner; the diagonal keeps the ends 1/4 from the boundary
# points while 1/2 apart from each other.
_CORNER_WS = (_Q("1/4", "3/4"), _Q("1/2", "1/2"), _Q("3/4", "1/4"))
# Three-arm variable, negative on the stem (N): south rail plus a stem whose
# two connectors each reach one rail end.
_VAR3_STEM_N = (
    _Q("1/4", "1/4"),
    _Q("3/4", "1/4"),
    _Q("1/2", "3/4"),
    _Q("3/8", "1/2"),
    _Q("5/8", "1/2"),
)
# Three-arm variable, negative on a bar arm (W): rail with centre tap plus a
# two-point stem hanging off the negative-side rail end.
_VAR3_BAR_W = (
    _Q("1/4", "1/4"),
    _Q("1/2", "1/4"),
    _Q("3/4", "1/4"),
    _Q("3/8", "1/2"),
    _Q("1/2", "3/4"),
)
# Three-literal clause: three far arm ends plus one shared centre point that
# must ride with exactly one arm.
_CLAUSE3_WEN = (
    _Q("1/4", "1/4"),
    _Q("3/4", "1/4"),
    _Q("1/2", "3/4"),
    _Q("1/2", "1/2"),
)

_HALF = Fraction(1, 2)


def _rot90(p: Vec) -> Vec:
    return (1 - p[1], p[0])


def _mirror(p: Vec) -> Vec:
    return (1 - p[0], p[1])


_DIR_ROT = {"E": "N", "N": "W", "W": "S", "S": "E"}
_DIR_MIR = {"E": "W", "W": "E", "N": "N", "S": "S"}


def _transforms():
    """The 8 symmetries of the tile as (point map, direction map) pairs."""
    out = []
    for mirror in (False, True):
        pt = _mirror if mirror else (lambda p: p)
        dm = dict(_DIR_MIR) if mirror else {d: d for d in DIRECTIONS}
        for _ in range(4):
            out.append((pt, dict(dm)))
            prev_pt, prev_dm = pt, dm
            pt = (lambda f: (lambda p: _rot90(f(p))))(prev_pt)
            dm = {d: _DIR_ROT[prev_dm[d]] for d in prev_dm}
    return out


_BASES: list[tuple[str, int, dict[str, str | None], tuple[Vec, ...]]] = [
    # (kind, r, {direction: role}, interior); role 'neg'/'pos' for variables
    ("edge", 2, {"W": None, "E": None}, _STRAIGHT_WE),
    ("edge", 2, {"W": None, "S": None}, _CORNER_WS),
    ("variable", 2, {"W": "neg", "E": "pos"}, _STRAIGHT_WE),
    ("variable", 2, {"W": "neg", "S": "pos"}, _CORNER_WS),
    ("variable", 3, {"N": "neg", "W": "pos", "E": "pos"}, _VAR3_STEM_N),
    ("variable", 3, {"W": "neg", "E": "pos", "N": "pos"}, _VAR3_BAR_W),
    ("clause", 2, {"W": None, "E": None}, _STRAIGHT_WE),
    ("clause", 2, {"W": None, "S": None}, _CORNER_WS),
    ("clause", 3, {"W": None, "E": None, "N": None}, _CLAUSE3_WEN),
]


def _gadget_name(kind: str, dirs: Iterable[str], negative: str | None) -> str:
    order = "".join(d for d in DIRECTIONS if d in set(dirs))
    if kind == "variable":
        return f"var-{order}-neg{negative}"
    return f"{kind}-{order}"


def build_library() -> dict[tuple, Gadget]:
    """All 40 tile types, generated by closing the base designs under the
    tile symmetries."""
    lib: dict[tuple, Gadget] = {}
    for kind, r, roles, interior in _BASES:
        for pt, dm in _transforms():
            dirs = tuple(sorted((dm[d] for d in roles), key=DIRECTIONS.index))
            negative = None
            for d, role in roles.items():
                if role == "neg":
                    negative = dm[d]
            g = Gadget(
                name=_gadget_name(kind, dirs, negative),
                kind=kind,
                r=r,
                directions=dirs,
                negative=negative,
                interior=tuple(sorted(pt(p) for p in interior)),
            )
            lib.setdefault(g.key(), g)
    return lib


def library_gadgets() -> tuple[Gadget, ...]:
    return tuple(sorted(build_library().values(), key=lambda g: g.name))


# --- JSON -------------------------------------------------------------------


def library_to_json(gadgets: Sequence[Gadget]) -> str:
    doc = {
        "format": FORMAT,
        "eps": rat_str(GADGET_EPS),
        "gadgets": [
            {
                "name": g.name,
                "kind": g.kind,
                "r": g.r,
                "directions": list(g.directions),
                "negative": g.negative,
                "interior": [[rat_str(x) for x in p] for p in g.interior],
                "boundary": {d: [rat_str(x) for x in BOUNDARY_MIDPOINT[d]] for d in g.directions},
            }
            for g in gadgets
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def library_from_json(text: str) -> tuple[Gadget, ...]:
    doc = _load_document(text)
    try:
        out = []
        for entry in doc["gadgets"]:
            out.append(
                Gadget(
                    name=str(entry["name"]),
                    kind=str(entry["kind"]),
                    r=int(entry["r"]),
                    directions=tuple(entry["directions"]),
                    negative=entry.get("negative"),
                    interior=tuple(vec(p) for p in entry["interior"]),
                )
            )
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed gadget library document: {e}") from e
    for g in out:
        for d in g.directions:
            if d not in DIRECTIONS:
                raise FormatError(f"gadget {g.name}: unknown direction {d!r}")
        if g.negative is not None and g.negative not in g.directions:
            raise FormatError(f"gadget {g.name}: negative direction not incident")
    return tuple(out)

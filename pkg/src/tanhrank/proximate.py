"""Proximate rank: greedy upper bound, nearby-witness construction, the
exact oracle over compression traces, and partition certificates.

The proximate rank at radius eps is the least rank over the closed uniform
(L-infinity) ball around a parameter.  The greedy bound relaxes each stage of
the rank computation (near-zero incoming weights, nearby signed (b,c) pairs,
near-zero merged outgoing weights).  The exact oracle minimises, over all
signed partitions of the units, the number of groups that can be neither
eliminated nor killed; the three feasibility checks touch disjoint
coordinates, so they decompose per unit, per group, and per killed group:

  (a) unit i eliminable          iff ||b_i||        <= eps
  (b) group mergeable (signs s)  iff per coordinate, max-min of s_i*(b_i,c_i)
                                     is at most 2*eps
  (c) group killable             iff per output coordinate,
                                     |sum s_i*a_i| <= eps * |group|

Thresholds mirror the algorithms exactly: stages 1 and 3 of the bound are
strict (>), feasibility in the closed ball is non-strict (<=).  The output
bias d is never constrained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .params import (
    FORMAT,
    BiaslessParameter,
    FormatError,
    LimitError,
    Parameter,
    Unit,
    Vec,
    _load_document,
    parameter_distance,
    scale_vec,
    sign_vec,
    uniform_distance,
    uniform_norm,
)

DEFAULT_UNIT_LIMIT = 9


@dataclass(frozen=True)
class GreedyResult:
    """Trace of the greedy bound: stage-1 eliminated unit indices, the
    approximate partition with its group starters, merged outgoing sums, and
    the bound value.  Unit indices are 0-based."""

    eliminated: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    starters: tuple[Vec, ...]
    merged: tuple[Vec, ...]
    bound: int


@dataclass(frozen=True)
class ParCertificate:
    """Partition of the units with incoming norm above eps (0-based)."""

    groups: tuple[tuple[int, ...], ...]


def _signed_pair(u: Unit) -> Vec:
    s = sign_vec(u.b)
    return tuple(s * x for x in u.b) + (s * u.c,)


def approx_partition(
    eps: Fraction, points: Sequence[Vec]
) -> tuple[tuple[tuple[int, ...], ...], tuple[Vec, ...]]:
    """Greedy partition: each point joins the lowest-indexed group whose
    starter is within uniform distance eps, else starts a new group."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    groups: list[list[int]] = []
    starters: list[Vec] = []
    for i, p in enumerate(points):
        for j, v in enumerate(starters):
            if uniform_distance(p, v) <= eps:
                groups[j].append(i)
                break
        else:
            starters.append(tuple(p))
            groups.append([i])
    return tuple(tuple(g) for g in groups), tuple(starters)


def greedy_bound(eps: Fraction, w: Parameter) -> GreedyResult:
    """Greedy upper bound on the proximate rank (never below it)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    kept = [i for i, u in enumerate(w.units) if uniform_norm(u.b) > eps]
    eliminated = tuple(i for i in range(w.h) if uniform_norm(w.units[i].b) <= eps)
    points = [_signed_pair(w.units[i]) for i in kept]
    local_groups, starters = approx_partition(eps, points)
    groups = tuple(tuple(kept[i] for i in g) for g in local_groups)
    merged = []
    for g in groups:
        alpha = [Fraction(0)] * w.m
        for i in g:
            s = sign_vec(w.units[i].b)
            for k in range(w.m):
                alpha[k] += s * w.units[i].a[k]
        merged.append(tuple(alpha))
    bound = sum(
        1 for g, alpha in zip(groups, merged) if uniform_norm(alpha) > eps * len(g)
    )
    return GreedyResult(
        eliminated=eliminated,
        groups=groups,
        starters=starters,
        merged=tuple(merged),
        bound=bound,
    )


def construct_witness(eps: Fraction, w: Parameter, greedy: GreedyResult) -> Parameter:
    """Parameter within distance eps of w whose rank equals greedy.bound.

    Stage-1 units get b=0, each group collapses onto its starter, and killed
    groups spread their merged outgoing weight back over their members.
    """
    if greedy != greedy_bound(eps, w):
        raise ValueError("greedy result was not produced from (eps, w)")
    units = list(w.units)
    for i in greedy.eliminated:
        u = units[i]
        units[i] = Unit(a=u.a, b=(Fraction(0),) * w.n, c=u.c)
    for g, v, alpha in zip(greedy.groups, greedy.starters, greedy.merged):
        killed = uniform_norm(alpha) <= eps * len(g)
        for i in g:
            s = sign_vec(w.units[i].b)
            a = units[i].a
            if killed:
                a = tuple(x - s * y / len(g) for x, y in zip(a, alpha))
            units[i] = Unit(a=a, b=scale_vec(s, v[: w.n]), c=s * v[w.n])
    return Parameter(n=w.n, m=w.m, units=tuple(units), d=w.d)


# --- exact oracle -----------------------------------------------------------


def _min_trace_length(
    bcs: list[Vec],
    avs: list[Vec],
    eps: Fraction,
    elim_ok: list[bool],
) -> int:
    """Minimum compression-trace length by subset DP.

    Enumerates merge-feasible signed blocks (sign of the block's lowest unit
    fixed to +1; per-coordinate spread only grows, so infeasible states prune
    their whole subtree), then covers the unit set by minimum total block
    cost, where a block costs 0 if it is a lone eliminable unit or killable,
    else 1.
    """
    h = len(bcs)
    if h == 0:
        return 0
    ncoord = len(bcs[0])
    two_eps = 2 * eps
    size = 1 << h
    inf = h + 1
    cost = [inf] * size

    def extend(mask: int, start: int, mins, maxs, sums, count: int) -> None:
        for j in range(start, h):
            bc = bcs[j]
            for sj in (1, -1):
                nmins = list(mins)
                nmaxs = list(maxs)
                ok = True
                for q in range(ncoord):
                    v = sj * bc[q]
                    if v < nmins[q]:
                        nmins[q] = v
                    if v > nmaxs[q]:
                        nmaxs[q] = v
                    if nmaxs[q] - nmins[q] > two_eps:
                        ok = False
                        break
                if not ok:
                    continue
                nmask = mask | (1 << j)
                nsums = [x + sj * y for x, y in zip(sums, avs[j])]
                ncount = count + 1
                c = 0 if all(abs(x) <= eps * ncount for x in nsums) else 1
                if c < cost[nmask]:
                    cost[nmask] = c
                extend(nmask, j + 1, nmins, nmaxs, nsums, ncount)

    for i in range(h):
        killable = all(abs(x) <= eps for x in avs[i])
        cost[1 << i] = 0 if (elim_ok[i] or killable) else 1
        extend(1 << i, i + 1, list(bcs[i]), list(bcs[i]), list(avs[i]), 1)

    dp = [inf] * size
    dp[0] = 0
    for mask in range(1, size):
        low = mask & -mask
        best = inf
        sub = mask
        while sub:
            if sub & low and cost[sub] < inf:
                c = cost[sub] + dp[mask ^ sub]
                if c < best:
                    best = c
            sub = (sub - 1) & mask
        dp[mask] = best
    return dp[size - 1]


def exact_prank(
    eps: Fraction, w: Parameter, unit_limit: int = DEFAULT_UNIT_LIMIT
) -> int:
    """Exact proximate rank at radius eps (exhaustive over signed traces)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if w.h > unit_limit:
        raise LimitError(f"h={w.h} exceeds unit limit {unit_limit}")
    bcs = [u.b + (u.c,) for u in w.units]
    avs = [u.a for u in w.units]
    elim_ok = [uniform_norm(u.b) <= eps for u in w.units]
    return _min_trace_length(bcs, avs, eps, elim_ok)


def exact_prank_biasless(
    eps: Fraction, u: BiaslessParameter, unit_limit: int = DEFAULT_UNIT_LIMIT
) -> int:
    """Exact proximate rank for the biasless variant (scalar b, no c)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if u.h > unit_limit:
        raise LimitError(f"h={u.h} exceeds unit limit {unit_limit}")
    bcs = [(t.b,) for t in u.units]
    avs = [(t.a,) for t in u.units]
    elim_ok = [abs(t.b) <= eps for t in u.units]
    return _min_trace_length(bcs, avs, eps, elim_ok)


# --- certificates -----------------------------------------------------------


def _check_partition_of(groups: tuple[tuple[int, ...], ...], required: set[int]) -> None:
    seen: set[int] = set()
    for g in groups:
        if not g:
            raise ValueError("certificate contains an empty group")
        for i in g:
            if i in seen:
                raise ValueError(f"unit {i + 1} appears in two groups")
            seen.add(i)
    if seen != required:
        raise ValueError("certificate is not a partition of the required unit set")


def verify_par_certificate(
    eps: Fraction, r: int, w: Parameter, cert: ParCertificate
) -> bool:
    """Check the two certificate conditions exactly.

    A verifying certificate witnesses prank_eps(w) <= r via the
    bounding-box-centroid construction.
    """
    required = {i for i, u in enumerate(w.units) if uniform_norm(u.b) > eps}
    _check_partition_of(cert.groups, required)
    over = 0
    for g in cert.groups:
        pairs = [_signed_pair(w.units[i]) for i in g]
        for x in range(len(pairs)):
            for y in range(x + 1, len(pairs)):
                if uniform_distance(pairs[x], pairs[y]) > 2 * eps:
                    return False
        alpha = [Fraction(0)] * w.m
        for i in g:
            s = sign_vec(w.units[i].b)
            for k in range(w.m):
                alpha[k] += s * w.units[i].a[k]
        if uniform_norm(tuple(alpha)) > eps * len(g):
            over += 1
    return over <= r


def derive_par_certificate(
    eps: Fraction, w: Parameter, w_star: Parameter
) -> ParCertificate:
    """Certificate from the merge partition of a nearby low-rank parameter.

    Groups units with incoming norm above eps by the signed (b,c) value they
    share in w_star; units whose sign orientation flips between w and w_star
    (possible only for n > 1) are split into their own group.
    """
    if parameter_distance(w, w_star) > eps:
        raise ValueError("w_star is not within distance eps of w")
    buckets: dict[tuple, list[int]] = {}
    for i, u in enumerate(w.units):
        if uniform_norm(u.b) <= eps:
            continue
        star = w_star.units[i]
        orient = sign_vec(u.b) * sign_vec(star.b)
        buckets.setdefault((_signed_pair(star), orient), []).append(i)
    groups = tuple(tuple(g) for g in sorted(buckets.values(), key=lambda g: g[0]))
    return ParCertificate(groups=groups)


def verify_upar_certificate(
    eps: Fraction, r: int, u: BiaslessParameter, cert: ParCertificate
) -> bool:
    """Biasless certificate check: groups of nearby |b| with at most r
    unkillable merged sums."""
    required = {i for i, t in enumerate(u.units) if abs(t.b) > eps}
    _check_partition_of(cert.groups, required)
    over = 0
    for g in cert.groups:
        mags = [abs(u.units[i].b) for i in g]
        if max(mags) - min(mags) > 2 * eps:
            return False
        total = sum(
            (1 if u.units[i].b > 0 else -1) * u.units[i].a for i in g
        )
        if abs(total) > eps * len(g):
            over += 1
    return over <= r


def certificate_to_json(cert: ParCertificate) -> str:
    doc = {
        "format": FORMAT,
        "groups": [[i + 1 for i in g] for g in cert.groups],
    }
    return json.dumps(doc, indent=2) + "\n"


def certificate_from_json(text: str) -> ParCertificate:
    doc = _load_document(text)
    try:
        groups = tuple(tuple(int(i) - 1 for i in g) for g in doc["groups"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed certificate document: {e}") from e
    if any(i < 0 for g in groups for i in g):
        raise FormatError("certificate unit indices are 1-based")
    return ParCertificate(groups=groups)

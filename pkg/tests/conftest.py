"""Shared test helpers: numpy batch evaluation oracles, seeded random
generators for parameters and point sets, expansion fixtures, and the
minimum-positive-slack computation used by the small-radius tests."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import numpy as np

from tanhrank.compress import CompressedParameter, reducibility
from tanhrank.params import (
    BiaslessParameter,
    Parameter,
    SymmetryTransform,
    Unit,
    insert_zero_incoming,
    insert_zero_outgoing,
    negative_split_unit,
    sign_vec,
    split_unit,
    uniform_norm,
)


def batch_eval(obj, X: np.ndarray) -> np.ndarray:
    """Evaluate a (compressed/biasless) parameter at rows of X, vectorised."""
    if isinstance(obj, BiaslessParameter):
        if obj.h == 0:
            return np.zeros(len(X))
        A = np.array([float(t.a) for t in obj.units])
        B = np.array([float(t.b) for t in obj.units])
        return np.tanh(X.reshape(-1, 1) * B) @ A
    if isinstance(obj, CompressedParameter):
        base = np.array(obj.delta.evaluate())
        units = obj.units
        n, m = obj.n, obj.m
    else:
        base = np.array([float(x) for x in obj.d])
        units = obj.units
        n, m = obj.n, obj.m
    if not units:
        return np.tile(base, (len(X), 1))
    A = np.array([[float(x) for x in u.a] for u in units])  # (h, m)
    B = np.array([[float(x) for x in u.b] for u in units])  # (h, n)
    C = np.array([float(u.c) for u in units])
    return np.tanh(X.reshape(len(X), n) @ B.T + C) @ A + base


def assert_same_function(f, g, n: int, count: int = 1000, tol: float = 1e-9, seed: int = 0):
    X = np.random.default_rng(seed).uniform(-10.0, 10.0, size=(count, n))
    ya, yb = batch_eval(f, X), batch_eval(g, X)
    err = float(np.max(np.abs(ya - yb)))
    assert err <= tol, f"functions differ by {err}"


def rnd_frac(rng: random.Random, span: int = 24, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_parameter(rng: random.Random, h: int, n: int = 1, m: int = 1) -> Parameter:
    units = tuple(
        Unit(
            a=tuple(rnd_frac(rng) for _ in range(m)),
            b=tuple(rnd_frac(rng) for _ in range(n)),
            c=rnd_frac(rng),
        )
        for _ in range(h)
    )
    return Parameter(n=n, m=m, units=units, d=tuple(rnd_frac(rng) for _ in range(m)))


def random_incompressible(rng: random.Random, h: int, n: int = 1, m: int = 1) -> Parameter:
    while True:
        w = random_parameter(rng, h, n, m)
        if reducibility(w).condition == "none":
            return w


def random_transform(rng: random.Random, h: int) -> SymmetryTransform:
    perm = list(range(h))
    rng.shuffle(perm)
    return SymmetryTransform(
        permutation=tuple(perm),
        signs=tuple(rng.choice((-1, 1)) for _ in range(h)),
    )


def random_expansion(rng: random.Random, w: Parameter, steps: int) -> Parameter:
    """Apply random function-preserving expansions (rank is unchanged)."""
    for _ in range(steps):
        op = rng.choice(("split", "negative-split", "zero-outgoing", "zero-incoming"))
        if op in ("split", "negative-split") and w.h == 0:
            op = "zero-outgoing"
        if op == "split":
            i = rng.randrange(w.h)
            t1 = tuple(rnd_frac(rng) for _ in range(w.m))
            t2 = tuple(x - y for x, y in zip(w.units[i].a, t1))
            w = split_unit(w, i, (t1, t2))
        elif op == "negative-split":
            i = rng.randrange(w.h)
            t2 = tuple(rnd_frac(rng) for _ in range(w.m))
            t1 = tuple(x + y for x, y in zip(w.units[i].a, t2))
            w = negative_split_unit(w, i, (t1, t2))
        elif op == "zero-outgoing":
            w = insert_zero_outgoing(
                w,
                rng.randrange(w.h + 1),
                tuple(rnd_frac(rng) for _ in range(w.n)),
                rnd_frac(rng),
            )
        else:
            w = insert_zero_incoming(
                w,
                rng.randrange(w.h + 1),
                tuple(rnd_frac(rng) for _ in range(w.m)),
                rng.choice((Fraction(0), rnd_frac(rng))),
            )
    return w


def min_positive_slack(w: Parameter) -> Fraction | None:
    """Largest radius eps* such that for eps < eps*, no compression-trace
    constraint beyond those already exactly satisfied becomes feasible;
    below it the proximate rank equals the rank."""
    cands: list[Fraction] = []
    units = w.units
    for u in units:
        nb = uniform_norm(u.b)
        if nb > 0:
            cands.append(nb)
        na = uniform_norm(u.a)
        if na > 0:
            cands.append(na)
    pairs = [u.b + (u.c,) for u in units]
    for i in range(len(units)):
        for j in range(i + 1, len(units)):
            for s in (1, -1):
                gap = max(
                    (abs(x - s * y) for x, y in zip(pairs[i], pairs[j])),
                    default=Fraction(0),
                )
                if gap > 0:
                    cands.append(Fraction(gap, 2))
    groups: dict[tuple, list[int]] = {}
    for idx, u in enumerate(units):
        s = sign_vec(u.b)
        if s == 0:
            continue
        key = tuple(s * x for x in u.b) + (s * u.c,)
        groups.setdefault(key, []).append(idx)
    for members in groups.values():
        for size in range(2, len(members) + 1):
            for sub in combinations(members, size):
                tot = [Fraction(0)] * w.m
                for i in sub:
                    s = sign_vec(units[i].b)
                    for k in range(w.m):
                        tot[k] += s * units[i].a[k]
                t = max(abs(x) for x in tot)
                if t > 0:
                    cands.append(Fraction(t, size))
    return min(cands) if cands else None

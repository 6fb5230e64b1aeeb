"""Reducibility testing, optimal lossless compression, rank, canonical
forms, and functional-equivalence testing.

Compression proceeds in three stages: fold zero-incoming-weight units into a
symbolic output constant, merge units sharing the exact value of
sign(b)*(b,c), then drop merged units whose combined outgoing weight is zero.
The result implements the same function and satisfies no reducibility
condition.  All comparisons are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .params import (
    FORMAT,
    BiaslessParameter,
    BiaslessUnit,
    ConstantTerm,
    FormatError,
    Parameter,
    Unit,
    Vec,
    _load_document,
    rat,
    rat_str,
    scale_vec,
    sign_vec,
    vec,
)


@dataclass(frozen=True)
class CompressedParameter:
    """Irreducible unit list plus symbolic output constant.

    Invariants: no unit has a zero outgoing or incoming vector, and the
    signed incoming/bias pairs +-(b,c) are pairwise distinct.
    """

    n: int
    m: int
    units: tuple[Unit, ...]
    delta: ConstantTerm

    @property
    def r(self) -> int:
        return len(self.units)


@dataclass(frozen=True)
class ReducibilityReport:
    """First reducibility condition satisfied, with witness unit indices
    (1-based), or condition 'none'."""

    condition: str  # 'i' | 'ii' | 'iii' | 'iv' | 'none'
    witness: tuple[int, ...]


_ZERO = Fraction(0)


def _is_zero(v: Vec) -> bool:
    return all(x.numerator == 0 for x in v)


def _signed_key(u: Unit, s: int) -> tuple[int, ...]:
    """Exact hash key for s*(b,c) as flat (numerator, denominator) integers;
    int tuples hash far faster than Fractions."""
    if s > 0:
        parts = [p for x in u.b for p in (x.numerator, x.denominator)]
        parts.append(u.c.numerator)
    else:
        parts = [p for x in u.b for p in (-x.numerator, x.denominator)]
        parts.append(-u.c.numerator)
    parts.append(u.c.denominator)
    return tuple(parts)


def _scalar_groups(units: tuple[Unit, ...]):
    """n=m=1 grouping fast path.

    Returns (folded, groups): constant terms of the b=0 units, and a map
    from the signed-key integers to [merged outgoing sum, representative
    index, sign].
    """
    folded: list[tuple[Vec, Fraction]] = []
    groups: dict[tuple[int, int, int, int], list] = {}
    for i, u in enumerate(units):
        b = u.b[0]
        nb = b.numerator
        if nb == 0:
            folded.append((u.a, u.c))
            continue
        c = u.c
        if nb > 0:
            key = (nb, b.denominator, c.numerator, c.denominator)
            entry = groups.get(key)
            if entry is None:
                groups[key] = [u.a[0], i, 1]
            else:
                entry[0] += u.a[0]
        else:
            key = (-nb, b.denominator, -c.numerator, c.denominator)
            entry = groups.get(key)
            if entry is None:
                groups[key] = [-u.a[0], i, -1]
            else:
                entry[0] -= u.a[0]
    return folded, groups


def reducibility(w: Parameter) -> ReducibilityReport:
    """Check the four reducibility conditions in order, exactly."""
    for i, u in enumerate(w.units):
        if _is_zero(u.a):
            return ReducibilityReport("i", (i + 1,))
    for i, u in enumerate(w.units):
        if _is_zero(u.b):
            return ReducibilityReport("ii", (i + 1,))
    seen: dict[tuple, int] = {}
    for j, u in enumerate(w.units):
        key = u.b + (u.c,)
        if key in seen:
            return ReducibilityReport("iii", (seen[key] + 1, j + 1))
        if key not in seen:
            seen[key] = j
    for j, u in enumerate(w.units):
        neg = scale_vec(-1, u.b) + (-u.c,)
        if neg in seen and seen[neg] != j:
            i = seen[neg]
            lo, hi = (i, j) if i < j else (j, i)
            return ReducibilityReport("iv", (lo + 1, hi + 1))
    return ReducibilityReport("none", ())


def compress(w: Parameter) -> CompressedParameter:
    """Optimal lossless compression; output is irreducible and implements f_w."""
    if w.n == 1 and w.m == 1:
        folded, groups1 = _scalar_groups(w.units)
        units1 = []
        for alpha, rep, s in groups1.values():
            if alpha.numerator == 0:
                continue
            u = w.units[rep]
            units1.append(
                Unit(a=(alpha,), b=u.b if s > 0 else (-u.b[0],), c=u.c if s > 0 else -u.c)
            )
        return CompressedParameter(
            n=1, m=1, units=tuple(units1), delta=ConstantTerm.folded(w.d, folded)
        )

    kept: list[int] = []
    folded = []
    for i, u in enumerate(w.units):
        if _is_zero(u.b):
            folded.append((u.a, u.c))
        else:
            kept.append(i)
    delta = ConstantTerm.folded(w.d, folded)

    # Group by the exact signed key; first-occurrence order is deterministic
    # and the minimum-index member carries the representative.
    groups: dict[tuple[int, ...], list] = {}
    for i in kept:
        u = w.units[i]
        s = sign_vec(u.b)
        key = _signed_key(u, s)
        entry = groups.get(key)
        if entry is None:
            groups[key] = entry = [[_ZERO] * w.m, i, s]
        alpha = entry[0]
        if s > 0:
            for k in range(w.m):
                alpha[k] += u.a[k]
        else:
            for k in range(w.m):
                alpha[k] -= u.a[k]

    units = []
    for alpha, rep, s in groups.values():
        if all(x.numerator == 0 for x in alpha):
            continue
        u = w.units[rep]
        beta = u.b if s > 0 else tuple(-x for x in u.b)
        units.append(Unit(a=tuple(alpha), b=beta, c=u.c if s > 0 else -u.c))
    return CompressedParameter(n=w.n, m=w.m, units=tuple(units), delta=delta)


def rank(w: Parameter) -> int:
    """Minimum hidden units needed to implement f_w exactly."""
    if w.n == 1 and w.m == 1:
        _, groups1 = _scalar_groups(w.units)
        return sum(1 for alpha, _, _ in groups1.values() if alpha.numerator != 0)
    groups: dict[tuple[int, ...], list[Fraction]] = {}
    for u in w.units:
        s = sign_vec(u.b)
        if s == 0:
            continue
        key = _signed_key(u, s)
        alpha = groups.get(key)
        if alpha is None:
            groups[key] = alpha = [_ZERO] * w.m
        if s > 0:
            for k in range(w.m):
                alpha[k] += u.a[k]
        else:
            for k in range(w.m):
                alpha[k] -= u.a[k]
    return sum(
        1
        for alpha in groups.values()
        if any(x.numerator != 0 for x in alpha)
    )


def canonical_form(w: Parameter) -> CompressedParameter:
    """Compression with units sorted lexicographically by (b, c); the unique
    representative of f_w among compressed forms."""
    c = compress(w)
    units = tuple(sorted(c.units, key=lambda u: u.b + (u.c,)))
    return CompressedParameter(n=c.n, m=c.m, units=units, delta=c.delta)


def equivalent(w: Parameter, v: Parameter) -> bool:
    """Exact functional-equivalence test via canonical forms.

    Sound always; complete under the symbolic-constant independence
    assumption (see ConstantTerm).
    """
    if (w.n, w.m) != (v.n, v.m):
        raise ValueError("parameters have different input/output dimensions")
    return canonical_form(w) == canonical_form(v)


def evaluate_compressed(c: CompressedParameter, x) -> tuple[float, ...]:
    """Evaluate the compressed function at x in floating point."""
    xs = (float(x),) if isinstance(x, (int, float)) else tuple(float(t) for t in x)
    if len(xs) != c.n:
        raise ValueError(f"input has length {len(xs)}, expected n={c.n}")
    out = list(c.delta.evaluate())
    for u in c.units:
        z = math.tanh(sum(float(bk) * xk for bk, xk in zip(u.b, xs)) + float(u.c))
        for k in range(c.m):
            out[k] += float(u.a[k]) * z
    return tuple(out)


def to_parameter_inexact(c: CompressedParameter) -> Parameter:
    """Rematerialize a Parameter for evaluation convenience.

    Inexact: the symbolic constant is evaluated in floating point and stored
    as the binary rational nearest that float.
    """
    d = tuple(Fraction(x) for x in c.delta.evaluate())
    return Parameter(n=c.n, m=c.m, units=c.units, d=d)


# --- biasless variant -------------------------------------------------------


def compress_biasless(u: BiaslessParameter) -> BiaslessParameter:
    """Biasless compression: drop b=0 units (they contribute tanh(0)=0),
    merge by |b|, drop zero merged outgoing weights."""
    groups: dict[Fraction, Fraction] = {}
    for t in u.units:
        if t.b == 0:
            continue
        s = 1 if t.b > 0 else -1
        key = abs(t.b)
        groups[key] = groups.get(key, _ZERO) + s * t.a
    units = tuple(
        BiaslessUnit(a=alpha, b=key) for key, alpha in groups.items() if alpha != 0
    )
    return BiaslessParameter(units=units)


def rank_biasless(u: BiaslessParameter) -> int:
    return compress_biasless(u).h


# --- JSON -------------------------------------------------------------------


def compressed_to_json(c: CompressedParameter) -> str:
    doc = {
        "format": FORMAT,
        "n": c.n,
        "m": c.m,
        "r": c.r,
        "units": [
            {"a": [rat_str(x) for x in u.a], "b": [rat_str(x) for x in u.b], "c": rat_str(u.c)}
            for u in c.units
        ],
        "delta": {
            "base": [rat_str(x) for x in c.delta.base],
            "terms": [
                {"a": [rat_str(x) for x in a], "c": rat_str(cc)}
                for a, cc in c.delta.terms
            ],
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def compressed_from_json(text: str) -> CompressedParameter:
    doc = _load_document(text)
    try:
        n, m = int(doc["n"]), int(doc["m"])
        units = tuple(
            Unit(a=vec(u["a"]), b=vec(u["b"]), c=rat(u["c"])) for u in doc["units"]
        )
        delta = ConstantTerm.folded(
            vec(doc["delta"]["base"]),
            [(vec(t["a"]), rat(t["c"])) for t in doc["delta"]["terms"]],
        )
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed compressed document: {e}") from e
    return CompressedParameter(n=n, m=m, units=units, delta=delta)

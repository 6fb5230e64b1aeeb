"""Exact-rational network parameters: representation, evaluation, metric,
symmetries, serialization, and function-preserving expansions.

A parameter describes a fully-connected network with one hidden tanh layer:
``f(x) = d + sum_i a_i * tanh(b_i . x + c_i)`` with ``n`` inputs, ``m``
outputs, and ``h`` hidden units.  All weights are ``fractions.Fraction``
values; floating point appears only in :func:`evaluate`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

FORMAT = "tanhrank/1"

Vec = tuple[Fraction, ...]


class FormatError(ValueError):
    """A JSON document is malformed or violates a type invariant."""


class LimitError(RuntimeError):
    """An instance exceeds a solver's exhaustive-enumeration size limit."""


def rat(x: int | str | Fraction) -> Fraction:
    """Coerce an int, ``p/q`` string, or exact decimal string to Fraction."""
    if isinstance(x, bool):
        raise FormatError(f"not a rational: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(f"not a rational: {x!r}") from e
    raise FormatError(f"not a rational: {x!r}")


def rat_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable[int | str | Fraction]) -> Vec:
    return tuple(rat(x) for x in xs)


def sign_vec(b: Vec) -> int:
    """Sign of the first nonzero component of b, or 0 if b is zero."""
    for x in b:
        n = x.numerator  # int comparison; Fraction.__gt__ is much slower
        if n > 0:
            return 1
        if n < 0:
            return -1
    return 0


def scale_vec(s: int | Fraction, v: Vec) -> Vec:
    return tuple(s * x for x in v)


def uniform_norm(v: Vec) -> Fraction:
    return max((abs(x) for x in v), default=Fraction(0))


def uniform_distance(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    """Largest absolute componentwise difference (exact)."""
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return max((abs(a - b) for a, b in zip(u, v)), default=Fraction(0))


@dataclass(frozen=True)
class Unit:
    """One hidden unit: outgoing vector a (length m), incoming vector b
    (length n), bias scalar c."""

    a: Vec
    b: Vec
    c: Fraction


@dataclass(frozen=True)
class Parameter:
    """Weights of a one-hidden-layer tanh network over exact rationals."""

    n: int
    m: int
    units: tuple[Unit, ...]
    d: Vec

    def __post_init__(self) -> None:
        if self.n < 1 or self.m < 1:
            raise FormatError("n and m must be >= 1")
        if len(self.d) != self.m:
            raise FormatError(f"d has length {len(self.d)}, expected m={self.m}")
        for i, u in enumerate(self.units):
            if len(u.a) != self.m or len(u.b) != self.n:
                raise FormatError(f"unit {i + 1} has inconsistent dimensions")

    @property
    def h(self) -> int:
        return len(self.units)


@dataclass(frozen=True)
class BiaslessUnit:
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class BiaslessParameter:
    """Weights of the biasless variant: f(x) = sum_i a_i * tanh(b_i * x)."""

    units: tuple[BiaslessUnit, ...]

    @property
    def h(self) -> int:
        return len(self.units)


def make_parameter(
    n: int,
    m: int,
    units: Iterable[tuple],
    d: Iterable[int | str | Fraction],
) -> Parameter:
    """Build a Parameter, coercing entries to Fraction.

    Each unit is ``(a, b, c)``; for n=1/m=1 the vector slots also accept bare
    scalars.
    """
    built = []
    for a, b, c in units:
        av = vec(a) if isinstance(a, (list, tuple)) else (rat(a),)
        bv = vec(b) if isinstance(b, (list, tuple)) else (rat(b),)
        built.append(Unit(a=av, b=bv, c=rat(c)))
    return Parameter(n=n, m=m, units=tuple(built), d=vec(d))


def make_biasless(units: Iterable[tuple]) -> BiaslessParameter:
    return BiaslessParameter(tuple(BiaslessUnit(rat(a), rat(b)) for a, b in units))


def scalar_from_flat(flat: Sequence[int | str | Fraction]) -> Parameter:
    """Build an n=m=1 parameter from the flat layout (a1,b1,c1,...,ah,bh,ch,d)."""
    xs = [rat(x) for x in flat]
    if len(xs) % 3 != 1:
        raise FormatError("flat scalar parameter needs length 3h+1")
    units = [(xs[i], xs[i + 1], xs[i + 2]) for i in range(0, len(xs) - 1, 3)]
    return make_parameter(1, 1, units, [xs[-1]])


def flatten(w: Parameter) -> Vec:
    """Flat coordinate vector (a1,b1,c1,...,ah,bh,ch,d), vectors inlined."""
    out: list[Fraction] = []
    for u in w.units:
        out.extend(u.a)
        out.extend(u.b)
        out.append(u.c)
    out.extend(w.d)
    return tuple(out)


def parameter_distance(w: Parameter, v: Parameter) -> Fraction:
    if (w.n, w.m, w.h) != (v.n, v.m, v.h):
        raise ValueError("parameters have different shapes")
    return uniform_distance(flatten(w), flatten(v))


# --- evaluation (the only floating-point surface) --------------------------


def evaluate(w: Parameter, x: float | Sequence[float]) -> tuple[float, ...]:
    """Evaluate f_w at x in floating point.  x is a scalar when n=1."""
    xs = (float(x),) if isinstance(x, (int, float)) else tuple(float(t) for t in x)
    if len(xs) != w.n:
        raise ValueError(f"input has length {len(xs)}, expected n={w.n}")
    out = [float(t) for t in w.d]
    for u in w.units:
        z = math.tanh(sum(float(bk) * xk for bk, xk in zip(u.b, xs)) + float(u.c))
        for k in range(w.m):
            out[k] += float(u.a[k]) * z
    return tuple(out)


def evaluate_biasless(u: BiaslessParameter, x: float) -> float:
    return sum(float(t.a) * math.tanh(float(t.b) * x) for t in u.units)


# --- symbolic constants -----------------------------------------------------


@dataclass(frozen=True)
class ConstantTerm:
    """Exact symbolic constant ``base + sum_j tanh(c_j) * a_j``.

    Canonical form: every c_j > 0 and distinct (odd symmetry folds negative
    arguments), no zero coefficient vectors, terms sorted by c.  Equality of
    canonical forms is sound (equal forms represent equal constants); it is
    complete only if {tanh(c) : c in Q+} is linearly independent over Q, which
    is assumed, not proven.
    """

    base: Vec
    terms: tuple[tuple[Vec, Fraction], ...]

    @staticmethod
    def folded(base: Vec, raw_terms: Iterable[tuple[Vec, Fraction]]) -> "ConstantTerm":
        """Canonicalize raw (coefficient, argument) pairs."""
        acc: dict[Fraction, list[Fraction]] = {}
        width = len(base)
        for a, c in raw_terms:
            if len(a) != width:
                raise ValueError("coefficient width mismatch")
            if c == 0:
                continue  # tanh(0) = 0
            if c < 0:
                a, c = scale_vec(-1, a), -c
            cur = acc.setdefault(c, [Fraction(0)] * width)
            for k in range(width):
                cur[k] += a[k]
        terms = tuple(
            (tuple(acc[c]), c)
            for c in sorted(acc)
            if any(x != 0 for x in acc[c])
        )
        return ConstantTerm(base=base, terms=terms)

    def evaluate(self) -> tuple[float, ...]:
        out = [float(x) for x in self.base]
        for a, c in self.terms:
            z = math.tanh(float(c))
            for k in range(len(out)):
                out[k] += float(a[k]) * z
        return tuple(out)


# --- symmetries -------------------------------------------------------------


@dataclass(frozen=True)
class SymmetryTransform:
    """Unit permutation plus per-slot sign flips (0-based permutation:
    output slot i receives unit permutation[i] scaled by signs[i])."""

    permutation: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        h = len(self.permutation)
        if sorted(self.permutation) != list(range(h)):
            raise ValueError("permutation is not a bijection of 0..h-1")
        if len(self.signs) != h or any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be a +-1 vector of length h")

    @property
    def h(self) -> int:
        return len(self.permutation)


def apply_transform(t: SymmetryTransform, w: Parameter) -> Parameter:
    """Relocate and sign-flip hidden units; implements the same function."""
    if t.h != w.h:
        raise ValueError(f"transform is for h={t.h}, parameter has h={w.h}")
    units = []
    for i in range(w.h):
        s = t.signs[i]
        src = w.units[t.permutation[i]]
        units.append(Unit(a=scale_vec(s, src.a), b=scale_vec(s, src.b), c=s * src.c))
    return Parameter(n=w.n, m=w.m, units=tuple(units), d=w.d)


# --- function-preserving expansions (inverse reducibility operations) -------


def split_unit(w: Parameter, i: int, coeffs: tuple[Vec, Vec]) -> Parameter:
    """Replace unit i by two units with outgoing weights t1, t2, t1+t2 = a_i."""
    _check_index(w, i)
    t1, t2 = vec(coeffs[0]), vec(coeffs[1])
    u = w.units[i]
    if tuple(x + y for x, y in zip(t1, t2)) != u.a:
        raise ValueError("split coefficients do not sum to the outgoing weight")
    units = w.units[:i] + (Unit(t1, u.b, u.c), Unit(t2, u.b, u.c)) + w.units[i + 1 :]
    return Parameter(w.n, w.m, units, w.d)


def negative_split_unit(w: Parameter, i: int, coeffs: tuple[Vec, Vec]) -> Parameter:
    """Replace unit i by (t1, b, c) and (t2, -b, -c) with t1 - t2 = a_i."""
    _check_index(w, i)
    t1, t2 = vec(coeffs[0]), vec(coeffs[1])
    u = w.units[i]
    if tuple(x - y for x, y in zip(t1, t2)) != u.a:
        raise ValueError("split coefficients do not differ by the outgoing weight")
    units = (
        w.units[:i]
        + (Unit(t1, u.b, u.c), Unit(t2, scale_vec(-1, u.b), -u.c))
        + w.units[i + 1 :]
    )
    return Parameter(w.n, w.m, units, w.d)


def insert_zero_outgoing(w: Parameter, i: int, b: Vec, c: Fraction) -> Parameter:
    """Insert a unit with zero outgoing weight at position i."""
    _check_insert_index(w, i)
    zero = (Fraction(0),) * w.m
    units = w.units[:i] + (Unit(zero, vec(b), rat(c)),) + w.units[i:]
    return Parameter(w.n, w.m, units, w.d)


def insert_zero_incoming(w: Parameter, i: int, a: Vec, c: Fraction) -> Parameter:
    """Insert a zero-incoming-weight unit at position i.

    For c = 0 the unit contributes tanh(0) = 0 and one unit is inserted.  For
    c != 0 the constant a*tanh(c) is irrational, so the cancelling pair
    (a,0,c),(-a,0,c) is inserted to keep the function and all weights exact.
    """
    _check_insert_index(w, i)
    av, cv = vec(a), rat(c)
    zero_b = (Fraction(0),) * w.n
    if cv == 0:
        new = (Unit(av, zero_b, cv),)
    else:
        new = (Unit(av, zero_b, cv), Unit(scale_vec(-1, av), zero_b, cv))
    return Parameter(w.n, w.m, w.units[:i] + new + w.units[i:], w.d)


def _check_index(w: Parameter, i: int) -> None:
    if not 0 <= i < w.h:
        raise IndexError(f"unit index {i} out of range for h={w.h}")


def _check_insert_index(w: Parameter, i: int) -> None:
    if not 0 <= i <= w.h:
        raise IndexError(f"insertion index {i} out of range for h={w.h}")


# --- JSON documents ---------------------------------------------------------


def parameter_to_json(w: Parameter) -> str:
    doc = {
        "format": FORMAT,
        "n": w.n,
        "m": w.m,
        "h": w.h,
        "units": [
            {"a": [rat_str(x) for x in u.a], "b": [rat_str(x) for x in u.b], "c": rat_str(u.c)}
            for u in w.units
        ],
        "d": [rat_str(x) for x in w.d],
    }
    return json.dumps(doc, indent=2) + "\n"


def parameter_from_json(text: str) -> Parameter:
    doc = _load_document(text)
    try:
        n, m, h = int(doc["n"]), int(doc["m"]), int(doc["h"])
        units = [
            Unit(a=vec(u["a"]), b=vec(u["b"]), c=rat(u["c"])) for u in doc["units"]
        ]
        d = vec(doc["d"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed parameter document: {e}") from e
    if h != len(units):
        raise FormatError(f"h={h} but document has {len(units)} units")
    return Parameter(n=n, m=m, units=tuple(units), d=d)


def biasless_to_json(u: BiaslessParameter) -> str:
    doc = {
        "format": FORMAT,
        "h": u.h,
        "units": [{"a": rat_str(t.a), "b": rat_str(t.b)} for t in u.units],
    }
    return json.dumps(doc, indent=2) + "\n"


def biasless_from_json(text: str) -> BiaslessParameter:
    doc = _load_document(text)
    try:
        h = int(doc["h"])
        units = tuple(BiaslessUnit(a=rat(t["a"]), b=rat(t["b"])) for t in doc["units"])
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed biasless document: {e}") from e
    if h != len(units):
        raise FormatError(f"h={h} but document has {len(units)} units")
    return BiaslessParameter(units=units)


def _load_document(text: str) -> Mapping:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from e
    if not isinstance(doc, Mapping):
        raise FormatError("document root must be an object")
    fmt = doc.get("format", FORMAT)
    if fmt != FORMAT:
        raise FormatError(f"unsupported format {fmt!r}")
    return doc

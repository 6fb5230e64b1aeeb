"""Core parameter representation: evaluation, metric, symmetries,
expansions, and serialization."""

import math
import random
from fractions import Fraction as F

import pytest

from conftest import assert_same_function, random_parameter, random_transform, rnd_frac
from tanhrank.compress import compress, rank
from tanhrank.params import (
    ConstantTerm,
    FormatError,
    Parameter,
    SymmetryTransform,
    Unit,
    apply_transform,
    evaluate,
    insert_zero_incoming,
    insert_zero_outgoing,
    make_parameter,
    negative_split_unit,
    parameter_distance,
    parameter_from_json,
    parameter_to_json,
    biasless_from_json,
    biasless_to_json,
    make_biasless,
    rat,
    scalar_from_flat,
    split_unit,
    uniform_distance,
)


def test_evaluate_empty_network():
    w = make_parameter(1, 1, [], [3])
    assert evaluate(w, 5.0) == (3.0,)


def test_evaluate_tanh_zero():
    w = make_parameter(1, 1, [(1, 1, 0)], [0])
    assert evaluate(w, 0.0) == (0.0,)


def test_evaluate_saturation():
    # tanh saturates: f(20) = 1 + 2*tanh(20) is within 1e-8 of 3
    w = make_parameter(1, 1, [(2, 1, 0)], [1])
    assert abs(evaluate(w, 20.0)[0] - 3.0) < 1e-8


def test_evaluate_multidim():
    w = make_parameter(2, 2, [((1, 2), (1, -1), 0)], [0, 1])
    y = evaluate(w, (3.0, 1.0))
    z = math.tanh(2.0)
    assert y == pytest.approx((z, 1 + 2 * z), abs=1e-12)


def test_uniform_distance_examples():
    assert uniform_distance((F(0), F(0)), (F(0), F(0))) == 0
    assert uniform_distance((F(1), F(-2)), (F(0), F(0))) == 2
    assert uniform_distance((F(1, 2), F(3)), (F(1), F(5, 2))) == F(1, 2)
    with pytest.raises(ValueError):
        uniform_distance((F(1),), (F(1), F(2)))


def test_uniform_distance_is_a_metric():
    rng = random.Random(11)
    for _ in range(200):
        u, v, t = (tuple(rnd_frac(rng) for _ in range(3)) for _ in range(3))
        assert uniform_distance(u, v) == uniform_distance(v, u)
        assert (uniform_distance(u, v) == 0) == (u == v)
        assert uniform_distance(u, t) <= uniform_distance(u, v) + uniform_distance(v, t)


def test_transform_identity():
    w = make_parameter(1, 1, [(1, 2, 3), (4, 5, 6)], [7])
    t = SymmetryTransform((0, 1), (1, 1))
    assert apply_transform(t, w) == w


def test_transform_swap():
    w = make_parameter(1, 1, [(1, 2, 3), (4, 5, 6)], [7])
    t = SymmetryTransform((1, 0), (1, 1))
    assert apply_transform(t, w) == make_parameter(1, 1, [(4, 5, 6), (1, 2, 3)], [7])


def test_transform_negation_preserves_function():
    w = make_parameter(1, 1, [(1, 2, 3)], [0])
    out = apply_transform(SymmetryTransform((0,), (-1,)), w)
    assert out == make_parameter(1, 1, [(-1, -2, -3)], [0])
    assert_same_function(w, out, n=1, count=100)


def test_transform_validation():
    with pytest.raises(ValueError):
        SymmetryTransform((0, 0), (1, 1))
    with pytest.raises(ValueError):
        SymmetryTransform((0,), (2,))
    w = make_parameter(1, 1, [(1, 2, 3)], [0])
    with pytest.raises(ValueError):
        apply_transform(SymmetryTransform((0, 1), (1, 1)), w)


def test_transform_function_preserved_randomly():
    rng = random.Random(5)
    for _ in range(100):
        n, m, h = rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 5)
        w = random_parameter(rng, h, n, m)
        t = random_transform(rng, h)
        assert_same_function(w, apply_transform(t, w), n=n, count=100, seed=1)


def test_split_unit_example():
    w = make_parameter(1, 1, [(3, 5, 7)], [0])
    out = split_unit(w, 0, ((F(1),), (F(2),)))
    assert out == make_parameter(1, 1, [(1, 5, 7), (2, 5, 7)], [0])
    with pytest.raises(ValueError):
        split_unit(w, 0, ((F(1),), (F(1),)))


def test_negative_split_merges_back():
    # (a=1,b,c) splits into (3,b,c),(2,-b,-c); the compression merge
    # restores the original outgoing weight.
    w = make_parameter(1, 1, [(1, 5, 7)], [0])
    out = negative_split_unit(w, 0, ((F(3),), (F(2),)))
    assert out == make_parameter(1, 1, [(3, 5, 7), (2, -5, -7)], [0])
    c = compress(out)
    assert [(u.a, u.b, u.c) for u in c.units] == [((F(1),), (F(5),), F(7))]
    assert_same_function(w, out, n=1, count=200)


def test_insert_zero_outgoing():
    w = make_parameter(1, 1, [(1, 2, 3)], [4])
    out = insert_zero_outgoing(w, 1, (F(9),), F(8))
    assert out.h == 2 and out.units[1] == Unit((F(0),), (F(9),), F(8))
    assert rank(out) == rank(w)
    assert_same_function(w, out, n=1, count=200)


def test_insert_zero_incoming_zero_bias():
    w = make_parameter(1, 1, [(1, 2, 3)], [4])
    out = insert_zero_incoming(w, 0, (F(5),), F(0))
    assert out.h == 2
    assert_same_function(w, out, n=1, count=200)


def test_insert_zero_incoming_nonzero_bias_is_exact():
    # a*tanh(c) is irrational for rational c != 0, so the cancelling pair is
    # inserted; the function and the rank are exactly preserved.
    w = make_parameter(1, 1, [(1, 2, 3)], [4])
    out = insert_zero_incoming(w, 1, (F(5),), F(2))
    assert out.h == 3
    assert rank(out) == rank(w) == 1
    assert_same_function(w, out, n=1, count=200)
    delta = compress(out).delta
    assert delta.terms == () and delta.base == (F(4),)


def test_expand_index_errors():
    w = make_parameter(1, 1, [(1, 2, 3)], [4])
    with pytest.raises(IndexError):
        split_unit(w, 1, ((F(1),), (F(0),)))
    with pytest.raises(IndexError):
        insert_zero_outgoing(w, 5, (F(1),), F(0))


def test_constant_term_canonicalization():
    ct = ConstantTerm.folded(
        (F(1),),
        [((F(2),), F(-3)), ((F(5),), F(3)), ((F(1),), F(0)), ((F(0),), F(7))],
    )
    # tanh(-3) folds to -tanh(3); tanh(0) and zero coefficients vanish
    assert ct.terms == (((F(3),), F(3)),)
    assert ct.evaluate()[0] == pytest.approx(1 + 3 * math.tanh(3))


def test_parameter_json_round_trip():
    w = make_parameter(
        2, 2, [((1, F(1, 3)), (2, -1), F(-5, 2)), ((0, 1), (1, 1), 0)], [0, F(7, 3)]
    )
    doc = parameter_to_json(w)
    again = parameter_from_json(doc)
    assert again == w
    assert parameter_to_json(again) == doc


def test_parse_rejects_unit_count_mismatch():
    bad = '{"format":"tanhrank/1","n":1,"m":1,"h":2,"units":[{"a":["1"],"b":["1"],"c":"0"}],"d":["0"]}'
    with pytest.raises(FormatError):
        parameter_from_json(bad)


def test_parse_exact_rationals():
    doc = '{"n":1,"m":1,"h":1,"units":[{"a":["1/3"],"b":["0.25"],"c":"2"}],"d":["0"]}'
    w = parameter_from_json(doc)
    assert w.units[0].a[0] == F(1, 3)
    assert w.units[0].b[0] == F(1, 4)


def test_biasless_json_round_trip():
    u = make_biasless([(F(1, 3), 2), (-1, F(5, 7))])
    doc = biasless_to_json(u)
    assert biasless_from_json(doc) == u
    assert biasless_to_json(biasless_from_json(doc)) == doc


def test_rat_parsing():
    assert rat("1/3") == F(1, 3)
    assert rat("0.125") == F(1, 8)
    assert rat(-4) == F(-4)
    with pytest.raises(FormatError):
        rat("abc")
    with pytest.raises(FormatError):
        rat("1/0")


def test_dimension_validation():
    with pytest.raises(FormatError):
        Parameter(n=1, m=1, units=(Unit((F(1), F(2)), (F(1),), F(0)),), d=(F(0),))
    with pytest.raises(FormatError):
        Parameter(n=0, m=1, units=(), d=(F(0),))


def test_parameter_distance():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    v = scalar_from_flat([1, 1, 0, -1, 1, 0, 0])
    assert parameter_distance(w, v) == 1

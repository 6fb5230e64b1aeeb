"""Greedy bound, witness construction, exact proximate-rank oracle, and
certificates."""

import random
from fractions import Fraction as F
from itertools import product

import pytest

from conftest import (
    min_positive_slack,
    random_expansion,
    random_incompressible,
    random_parameter,
    random_transform,
    rnd_frac,
)
from tanhrank.compress import equivalent, rank
from tanhrank.params import (
    LimitError,
    Parameter,
    Unit,
    apply_transform,
    make_biasless,
    make_parameter,
    parameter_distance,
    scalar_from_flat,
    uniform_norm,
)
from tanhrank.proximate import (
    ParCertificate,
    approx_partition,
    certificate_from_json,
    certificate_to_json,
    construct_witness,
    derive_par_certificate,
    exact_prank,
    exact_prank_biasless,
    greedy_bound,
    verify_par_certificate,
    verify_upar_certificate,
)


def rnd_eps(rng):
    return F(rng.randint(1, 24), 8)


def test_approx_partition_hand_trace():
    pts = [(F(0), F(0)), (F(1, 2), F(1, 2)), (F(2), F(0)), (F(3, 2), F(2, 5))]
    groups, starters = approx_partition(F(1), pts)
    assert groups == ((0, 1), (2, 3))
    assert starters == ((F(0), F(0)), (F(2), F(0)))


def test_approx_partition_singleton():
    groups, starters = approx_partition(F(1), [(F(7), F(7))])
    assert groups == ((0,),) and starters == ((F(7), F(7)),)


def test_approx_partition_greedy_suboptimality():
    # one radius-1 ball at 1 covers all three, but the greedy pass opens two
    pts = [(F(0), F(0)), (F(1), F(0)), (F(2), F(0))]
    groups, _ = approx_partition(F(1), pts)
    assert groups == ((0, 1), (2,))


def test_greedy_bound_hand_trace():
    w = scalar_from_flat([3, F(1, 2), 0, 4, 5, 0, 0])
    g = greedy_bound(F(1), w)
    assert g.eliminated == (0,)
    assert g.groups == ((1,),)
    assert g.bound == 1


def test_greedy_bound_large_eps_zero():
    w = scalar_from_flat([3, F(1, 2), 0, -2, F(1, 4), 1, 5])
    eps = uniform_norm((F(3), F(1, 2), F(0), F(-2), F(1, 4), F(1), F(5)))
    g = greedy_bound(eps, w)
    assert g.bound == 0 and g.groups == ()


def test_greedy_bound_on_merging_example():
    # Algorithm trace: unit 2 is eliminated in stage 1, unit 1 survives with
    # |alpha| = 2 > eps, so the bound is 1 even though the proximate rank is
    # 0 (greedy suboptimality; the exact oracle sees the merge).
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    assert greedy_bound(F(1), w).bound == 1
    assert exact_prank(F(1), w) == 0


def test_witness_postconditions_random():
    rng = random.Random(41)
    for _ in range(200):
        n, m = rng.randint(1, 2), rng.randint(1, 2)
        w = random_parameter(rng, rng.randint(0, 6), n, m)
        eps = rnd_eps(rng)
        g = greedy_bound(eps, w)
        u = construct_witness(eps, w, g)
        assert parameter_distance(w, u) <= eps
        assert rank(u) == g.bound


def test_witness_identity_when_eps_below_everything():
    w = make_parameter(1, 1, [(1, 4, 0), (1, 9, 0)], [0])
    g = greedy_bound(F(1), w)
    assert g.bound == 2
    assert construct_witness(F(1), w, g) == w


def test_witness_rejects_inconsistent_input():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    g = greedy_bound(F(1), w)
    with pytest.raises(ValueError):
        construct_witness(F(2), w, g)


def test_paper_example_exact_prank_values():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    w2 = scalar_from_flat([2, 2, 0, 5, 0, 0, 0])
    assert exact_prank(F(1), w) == 0
    assert exact_prank(F(1), w2) == 1


def test_paper_witness_regression():
    # the published nearby parameter: merge then eliminate, rank 0
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    witness = scalar_from_flat([1, 1, 0, -1, 1, 0, 0])
    assert parameter_distance(w, witness) <= 1
    assert rank(witness) == 0


def test_equivalent_parameters_may_differ_in_prank():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    w2 = scalar_from_flat([2, 2, 0, 5, 0, 0, 0])
    assert equivalent(w, w2)
    assert exact_prank(F(1), w) == 0 != 1 == exact_prank(F(1), w2)


def test_sandwich_small_random():
    rng = random.Random(43)
    for _ in range(120):
        n, m = rng.randint(1, 2), rng.randint(1, 2)
        w = random_parameter(rng, rng.randint(0, 6), n, m)
        eps = rnd_eps(rng)
        lo = exact_prank(eps, w)
        mid = greedy_bound(eps, w).bound
        assert lo <= mid <= rank(w)


def test_antitone_in_eps():
    rng = random.Random(47)
    grid = [F(k, 4) for k in range(1, 9)]
    for _ in range(40):
        w = random_parameter(rng, rng.randint(0, 5))
        values = [exact_prank(e, w) for e in grid]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_symmetry_transform_invariance():
    rng = random.Random(53)
    for _ in range(60):
        w = random_parameter(rng, rng.randint(0, 5))
        t = random_transform(rng, w.h)
        eps = rnd_eps(rng)
        assert exact_prank(eps, apply_transform(t, w)) == exact_prank(eps, w)


def test_small_eps_attains_rank():
    rng = random.Random(59)
    for _ in range(60):
        w = random_parameter(rng, rng.randint(1, 5))
        slack = min_positive_slack(w)
        if slack is None:
            continue
        assert exact_prank(slack / 2, w) == rank(w)


def test_large_eps_floor():
    rng = random.Random(61)
    for _ in range(60):
        w = random_parameter(rng, rng.randint(1, 5))
        eps = max(uniform_norm(u.b) for u in w.units)
        if eps == 0:
            eps = F(1)
        assert exact_prank(eps, w) == 0


def test_incompressible_equivalent_same_prank():
    rng = random.Random(67)
    for _ in range(40):
        w = random_incompressible(rng, rng.randint(1, 4))
        t = random_transform(rng, w.h)
        v = apply_transform(t, w)
        eps = rnd_eps(rng)
        assert equivalent(w, v)
        assert exact_prank(eps, w) == exact_prank(eps, v)


def test_exact_prank_unit_limit():
    w = random_parameter(random.Random(0), 10)
    with pytest.raises(LimitError):
        exact_prank(F(1), w)
    assert isinstance(exact_prank(F(1), w, unit_limit=10), int)


def test_exact_prank_biasless_examples():
    assert exact_prank_biasless(F(2), make_biasless([(2, 2)])) == 0
    assert exact_prank_biasless(F(1), make_biasless([(2, 2)])) == 1
    # merging across the sign symmetry: |b| values within 2*eps
    assert exact_prank_biasless(F(1), make_biasless([(1, 2), (1, -3)])) == 1
    assert exact_prank_biasless(F(1, 4), make_biasless([(1, 2), (1, -3)])) == 2


def test_box_grid_sanity():
    # Grid search over the closed box never beats the oracle, and on
    # instances whose optimum lies on the grid it matches it.
    rng = random.Random(71)

    def grid_min_rank(w, eps, step, samples=None):
        coords = []
        for u in w.units:
            coords.extend([u.a[0], u.b[0], u.c])
        offsets = []
        k = int(eps / step)
        choices = [step * t for t in range(-k, k + 1)]
        best = rank(w)
        if samples is None:
            space = product(choices, repeat=len(coords))
        else:
            space = (
                tuple(rng.choice(choices) for _ in coords) for _ in range(samples)
            )
        for delta in space:
            it = iter(delta)
            units = []
            for u in w.units:
                units.append(
                    Unit((u.a[0] + next(it),), (u.b[0] + next(it),), u.c + next(it))
                )
            best = min(best, rank(Parameter(1, 1, tuple(units), w.d)))
        return best

    for trial in range(6):
        w = random_parameter(rng, 1)
        eps = F(1, 2)
        g = grid_min_rank(w, eps, eps / 8)
        assert g >= exact_prank(eps, w)
    for trial in range(4):
        w = random_parameter(rng, 2)
        eps = F(1, 2)
        g = grid_min_rank(w, eps, eps / 2)
        assert g >= exact_prank(eps, w)
    w = random_parameter(rng, 3)
    eps = F(1, 2)
    g = grid_min_rank(w, eps, eps / 8, samples=20000)
    assert g >= exact_prank(eps, w)
    # aligned instance: the rank-0 witness lies on the eps/2 grid
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    assert grid_min_rank(w, F(1), F(1, 2)) == exact_prank(F(1), w) == 0


# --- certificates -----------------------------------------------------------


def test_certificate_from_nearby_low_rank_parameter():
    rng = random.Random(73)
    for _ in range(40):
        base = random_incompressible(rng, rng.randint(1, 3))
        w_star = random_expansion(rng, base, rng.randint(0, 3))
        eps = rnd_eps(rng)
        # perturb every coordinate by at most eps
        units = tuple(
            Unit(
                a=tuple(x + F(rng.randint(-8, 8), 8) * eps / 8 for x in u.a),
                b=tuple(x + F(rng.randint(-8, 8), 8) * eps / 8 for x in u.b),
                c=u.c + F(rng.randint(-8, 8), 8) * eps / 8,
            )
            for u in w_star.units
        )
        w = Parameter(w_star.n, w_star.m, units, w_star.d)
        assert parameter_distance(w, w_star) <= eps
        cert = derive_par_certificate(eps, w, w_star)
        assert verify_par_certificate(eps, rank(w_star), w, cert)
        assert exact_prank(eps, w) <= rank(w_star)


def test_trivial_singleton_certificate():
    rng = random.Random(79)
    for _ in range(20):
        w = random_incompressible(rng, 3)
        eps = F(1, 100)
        cert = derive_par_certificate(eps, w, w)
        assert verify_par_certificate(eps, rank(w), w, cert)
        assert not verify_par_certificate(eps, rank(w) - 1, w, cert)


def test_certificate_group_violating_pairwise_condition():
    w = make_parameter(1, 1, [(1, 1, 0), (1, 5, 0)], [0])
    cert = ParCertificate(groups=((0, 1),))
    assert not verify_par_certificate(F(1), 2, w, cert)


def test_certificate_partition_validation():
    w = make_parameter(1, 1, [(1, 1, 0), (1, 5, 0)], [0])
    with pytest.raises(ValueError):
        verify_par_certificate(F(1), 2, w, ParCertificate(groups=((0,),)))
    with pytest.raises(ValueError):
        verify_par_certificate(F(1), 2, w, ParCertificate(groups=((0, 0), (1,))))
    with pytest.raises(ValueError):
        verify_par_certificate(F(1), 2, w, ParCertificate(groups=((0,), (1,), ())))


def test_certificate_appendix_example_pair():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    w_star = scalar_from_flat([1, 1, 0, -1, 1, 0, 0])  # rank 0, distance 1
    cert = derive_par_certificate(F(1), w, w_star)
    assert verify_par_certificate(F(1), 0, w, cert)


def test_derive_rejects_distant_parameter():
    w = scalar_from_flat([2, 2, 0, 0, 0, 0, 0])
    far = scalar_from_flat([2, 8, 0, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        derive_par_certificate(F(1), w, far)


def test_upar_certificate():
    u = make_biasless([(2, 1), (-2, F(3, 2))])
    cert = ParCertificate(groups=((0, 1),))
    # |b| gap 1/2 <= 2*eps and the merged sum vanishes
    assert verify_upar_certificate(F(1, 4), 0, u, cert)
    assert not verify_upar_certificate(F(1, 4), 0, u, ParCertificate(groups=((0,), (1,))))


def test_certificate_json_round_trip():
    cert = ParCertificate(groups=((0, 2), (1,)))
    doc = certificate_to_json(cert)
    assert '"groups"' in doc and "[1," not in doc.replace("[1, 3]", "")
    assert certificate_from_json(doc) == cert

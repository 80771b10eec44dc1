import random
from itertools import permutations

import pytest

from matpot import (
    ArityError,
    Context,
    GoodDecomposition,
    LinearMatroid,
    PreconditionError,
    StrongDecomposition,
    UniformMatroid,
    all_good_decompositions,
    descent_move,
    enumerate_strong_decompositions,
    equivalence_report,
    find_strong_decomposition,
    is_base,
    l1_distance,
    locally_related,
    min_tight_subset,
    remainder_alternative,
    remainder_support,
    strong_deficiency_witness,
    tight_subsets,
)
from matpot.systems import _bounded_compositions

from oracles import brute_good_decompositions, brute_strong_decompositions


def test_is_base_examples(u13, linear_pairs):
    ctx1 = Context(u13, 1)
    assert is_base(ctx1.unit(2))
    ctx2 = Context(linear_pairs, 1)
    assert is_base(ctx2.system((1, 0, 1)))
    assert not is_base(ctx2.system((2, 0, 0)))


def test_system_arithmetic(ctx_u13_m2):
    T = ctx_u13_m2.system((2, 1, 0))
    assert T.total == 3
    assert T.support == {1, 2}
    assert (T + ctx_u13_m2.unit(3)).mult == (2, 1, 1)
    assert (T - ctx_u13_m2.unit(1)).mult == (1, 1, 0)
    assert T.try_sub(ctx_u13_m2.system((0, 2, 0))) is None
    with pytest.raises(ArityError):
        T - ctx_u13_m2.system((0, 2, 0))


def test_l1_distance_is_a_metric(ctx_u13_m2):
    rng = random.Random(6)
    systems = [
        ctx_u13_m2.system(tuple(rng.randint(0, 3) for _ in range(3))) for _ in range(12)
    ]
    for A in systems:
        assert l1_distance(A, A) == 0
        for B in systems:
            assert l1_distance(A, B) == l1_distance(B, A)
            assert (l1_distance(A, B) == 0) == (A == B)
            for C in systems:
                assert l1_distance(A, C) <= l1_distance(A, B) + l1_distance(B, C)


def test_find_strong_decomposition_example(ctx_u13_m2):
    T = ctx_u13_m2.system((2, 1, 0))
    dec = find_strong_decomposition(T, 1)
    assert dec is not None and dec.validate(T)
    # deterministic result of the augmenting-path search
    assert tuple(p.mult for p in dec.parts) == ((1, 0, 0), (1, 0, 0))
    assert dec.remainder.mult == (0, 1, 0)
    key = (tuple(sorted(p.mult for p in dec.parts)), dec.remainder.mult)
    assert key in brute_strong_decompositions(T, 1)


def test_strong_decomposition_zero_remainder(ctx_u13_m2):
    T = ctx_u13_m2.system((1, 1, 0))
    dec = find_strong_decomposition(T, 0)
    assert dec is not None
    assert dec.remainder.total == 0 and dec.remainder.mult == (0, 0, 0)


def test_strong_decomposition_infeasible_with_witness():
    ctx = Context(LinearMatroid([(1, 0), (2, 0), (0, 1)]), 2)
    T = ctx.system((2, 2, 0))
    assert find_strong_decomposition(T, 0) is None
    violation = strong_deficiency_witness(T, 0)
    assert violation.B == {1, 2}
    assert violation.mass == 4 and violation.bound == 2
    assert strong_deficiency_witness(ctx.system((1, 1, 2)), 0) is None


def test_arity_errors(ctx_u13_m2):
    with pytest.raises(ArityError):
        find_strong_decomposition(ctx_u13_m2.system((1, 0, 0)), 1)
    with pytest.raises(ArityError):
        all_good_decompositions(ctx_u13_m2.system((1, 1, 0)))


def test_enumerate_matches_bruteforce(ctx_u13_m2, u24):
    cases = [
        (ctx_u13_m2.system((2, 1, 0)), 1),
        (ctx_u13_m2.system((2, 2, 1)), 3),
        (Context(u24, 2).system((2, 1, 1, 1)), 1),
    ]
    for T, l in cases:
        mine = {
            (tuple(sorted(p.mult for p in d.parts)), d.remainder.mult)
            for d in enumerate_strong_decompositions(T, l)
        }
        assert mine == brute_strong_decompositions(T, l)


def test_all_good_decompositions_u12():
    ctx = Context(UniformMatroid(1, 2), 2)
    T = ctx.system((2, 2))
    goods = all_good_decompositions(T)
    assert len(goods) == 2
    assert [g.T2.mult for g in goods] == [(1, 2), (2, 1)]  # lexicographic in T2
    for g in goods:
        assert g.validate()
    # every 3-subsystem of T qualifies
    assert {g.T2.mult for g in goods} == {
        mult for mult in _bounded_compositions(3, T.mult)
    }
    assert {(g.T1.mult, g.T2.mult) for g in goods} == brute_good_decompositions(T)


def test_good_decompositions_empty_when_no_strong_subsystem():
    ctx = Context(LinearMatroid([(1, 0), (2, 0), (0, 1)]), 2)
    # k = 2, so a strong 5-subsystem needs two disjoint bases; (5,0,0) has
    # support of rank 1 only
    assert all_good_decompositions(ctx.system((5, 0, 0))) == ()


def test_good_decomposition_count_invariant_under_automorphism(linear_pairs):
    ctx = Context(linear_pairs, 2)  # every pair of labels is a base
    T = ctx.system((3, 1, 1))
    count = len(all_good_decompositions(T))
    for perm in permutations((3, 1, 1)):
        assert len(all_good_decompositions(ctx.system(perm))) == count


def test_locally_related_reflexive_and_symmetric(ctx_u13_m2):
    rng = random.Random(8)
    T = ctx_u13_m2.system((2, 2, 1))
    goods = all_good_decompositions(T)
    for d in goods:
        assert locally_related(d, d)
    for _ in range(20):
        a, b = rng.choice(goods), rng.choice(goods)
        assert locally_related(a, b) == locally_related(b, a)


def test_locally_related_explicit_move(ctx_u13_m2):
    ctx = ctx_u13_m2
    T2 = ctx.system((2, 1, 0))
    witness = find_strong_decomposition(T2, 1)
    assert witness.remainder.mult == (0, 1, 0)
    T1 = ctx.system((1, 0, 1))
    d = GoodDecomposition(T1=T1, T2=T2, witness=witness)
    # swap the remainder label 2 into the first member against label 3
    r2 = T2 + ctx.unit(3) - ctx.unit(2)
    moved = GoodDecomposition(
        T1=T1 - ctx.unit(3) + ctx.unit(2),
        T2=r2,
        witness=StrongDecomposition.make(witness.parts, ctx.unit(3)),
    )
    assert moved.validate()
    assert locally_related(d, moved) and locally_related(moved, d)


def test_locally_related_rejects_mismatched_totals(ctx_u13_m2):
    goods_a = all_good_decompositions(ctx_u13_m2.system((2, 1, 1)))
    goods_b = all_good_decompositions(ctx_u13_m2.system((2, 2, 1)))
    with pytest.raises(PreconditionError):
        locally_related(goods_a[0], goods_b[0])


def test_ordered_matching_agrees_with_unordered(ctx_u13_m2, u24):
    contexts = [ctx_u13_m2, Context(u24, 2)]
    for ctx in contexts:
        caps = (ctx.m * ctx.k + 2,) * ctx.n
        for mult in _bounded_compositions(ctx.m * ctx.k + 2, caps):
            T = ctx.system(mult)
            goods = all_good_decompositions(T)
            for i in range(len(goods)):
                for j in range(i, len(goods)):
                    assert locally_related(goods[i], goods[j]) == locally_related(
                        goods[i], goods[j], ordered=True
                    )


def test_equivalence_single_node(ctx_u13_m2):
    T = ctx_u13_m2.system((3, 0, 0))
    report = equivalence_report(T)
    assert len(report.nodes) == 1
    assert report.component_count == 1


def test_equivalence_example(ctx_u13_m2):
    report = equivalence_report(ctx_u13_m2.system((2, 1, 1)))
    assert len(report.nodes) == 3
    assert report.component_count == 1
    for i, j in report.edges:
        assert locally_related(report.nodes[i], report.nodes[j])


def test_equivalence_sweep_small(linear_pairs):
    for m in (1, 2):
        ctx = Context(linear_pairs, m)
        mk = m * ctx.k
        for total in range(mk + 1, mk + 3):
            for mult in _bounded_compositions(total, (total,) * ctx.n):
                report = equivalence_report(ctx.system(mult))
                if report.nodes:
                    assert report.component_count == 1


def test_tight_subsets_examples(ctx_u13_m2):
    T = ctx_u13_m2.system((3, 0, 0))
    fam = tight_subsets(T, 1)
    assert fam == {frozenset({1})}
    assert min_tight_subset(T, 1) == {1}
    assert remainder_support(T, 1) == {1}

    T2 = ctx_u13_m2.system((1, 1, 1))
    assert min_tight_subset(T2, 1) == {1, 2, 3}
    assert remainder_support(T2, 1) == {1, 2, 3}


def test_tight_subsets_contain_support_and_are_lattice(ctx_u13_m2, u24):
    contexts = [ctx_u13_m2, Context(u24, 2)]
    rng = random.Random(44)
    for ctx in contexts:
        for _ in range(25):
            l = rng.randint(0, 3)
            total = ctx.m * ctx.k + l
            mult = [0] * ctx.n
            for _ in range(total):
                mult[rng.randrange(ctx.n)] += 1
            T = ctx.system(tuple(mult))
            if find_strong_decomposition(T, l) is None:
                continue
            fam = tight_subsets(T, l)
            assert T.support in fam
            for A in fam:
                for B in fam:
                    assert (A | B) in fam and (A & B) in fam
            assert min_tight_subset(T, l) in fam
            if l >= 1:
                assert min_tight_subset(T, l) == remainder_support(T, l)
            else:
                assert min_tight_subset(T, l) == frozenset()


def test_remainder_support_preconditions(ctx_u13_m2):
    with pytest.raises(PreconditionError):
        remainder_support(ctx_u13_m2.system((1, 1, 0)), 0)
    ctx = Context(LinearMatroid([(1, 0), (2, 0), (0, 1)]), 2)
    with pytest.raises(PreconditionError):
        remainder_support(ctx.system((3, 2, 0)), 1)  # not strong


def test_remainder_alternative_equal_systems(ctx_u13_m2):
    S = ctx_u13_m2.system((2, 1, 0))
    out = remainder_alternative(S, S)
    assert out.kind == "matched"
    labels = {a for a, _ in out.matched}
    assert labels == remainder_support(S, 1)
    for a, dec in out.matched:
        assert dec.validate(S)
        assert dec.remainder.support == {a}


def test_remainder_alternative_disjoint_supports(ctx_u13_m2):
    S = ctx_u13_m2.system((3, 0, 0))
    T = ctx_u13_m2.system((0, 3, 0))
    out = remainder_alternative(S, T)
    assert out.kind == "surplus"
    assert out.surplus.validate(T)
    i = next(iter(out.surplus.remainder.support))
    assert T(i) > S(i)


def test_remainder_alternative_always_certified(ctx_u13_m2, u24):
    rng = random.Random(17)
    for ctx in (ctx_u13_m2, Context(u24, 1)):
        need = ctx.m * ctx.k + 1
        strong = []
        for mult in _bounded_compositions(need, (need,) * ctx.n):
            T = ctx.system(mult)
            if find_strong_decomposition(T, 1) is not None:
                strong.append(T)
        for _ in range(40):
            S, T = rng.choice(strong), rng.choice(strong)
            out = remainder_alternative(S, T)
            if out.kind == "surplus":
                assert out.surplus.validate(T)
                i = next(iter(out.surplus.remainder.support))
                assert T(i) > S(i)
            else:
                assert {a for a, _ in out.matched} == remainder_support(S, 1)
                for a, dec in out.matched:
                    assert dec.validate(T) and dec.remainder.support == {a}


def _distinct_good_pairs(T):
    goods = all_good_decompositions(T)
    for i in range(len(goods)):
        for j in range(len(goods)):
            if i != j:
                yield goods[i], goods[j]


def test_descent_move_decreases_distance_by_two(ctx_u13_m2, u24):
    cases = [
        ctx_u13_m2.system((2, 1, 1)),
        ctx_u13_m2.system((2, 2, 1)),
        Context(u24, 1).system((2, 1, 1, 1)),
        Context(UniformMatroid(1, 3), 1).system((2, 1, 0)),
    ]
    seen_cases = set()
    for T in cases:
        for dT, dS in _distinct_good_pairs(T):
            move = descent_move(dT, dS)
            seen_cases.add(move.case)
            assert move.distance_after == move.distance_before - 2
            assert move.moved_t.validate()
            assert locally_related(move.moved_t, dT)
            if move.case == "matched":
                assert move.moved_s.validate()
                assert locally_related(move.moved_s, dS)
    assert seen_cases == {"surplus", "matched"}


def test_descent_move_rejects_equal(ctx_u13_m2):
    goods = all_good_decompositions(ctx_u13_m2.system((2, 1, 1)))
    with pytest.raises(PreconditionError):
        descent_move(goods[0], goods[0])


def test_context_requires_positive_rank():
    with pytest.raises(PreconditionError):
        Context(UniformMatroid(0, 3), 1)
    with pytest.raises(PreconditionError):
        Context(UniformMatroid(1, 3), 0)

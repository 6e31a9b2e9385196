import itertools
import random

import pytest
from hypothesis import given, strategies as st

from procount.perm import (FinitePermGroup, all_subgroups, cantor_pair, cantor_unpair, check_borel_conditions,
                           check_partial, check_table, compose, cyclic_table, cylinder_members,
                           embed_product, invert, is_subgroup, partial_compose, partial_inverse, sigma,
                           support)


def test_worked_examples():
    assert partial_compose((7, 4, 3, 1, 0), (3, 4, 6)) == (1, 0)
    assert partial_inverse((1, 2, 0, 5)) == (2, 0, 1)


def test_trivial_cases():
    s = (3, 0, 2)
    assert partial_compose(sigma(5), s) == s
    assert partial_compose(s, ()) == ()
    assert partial_inverse(sigma(4)) == sigma(4)
    with pytest.raises(ValueError):
        check_partial((1, 1))


partials = st.lists(st.integers(0, 9), max_size=8, unique=True).map(tuple)


@given(partials)
def test_double_inverse_is_contained(s):
    back = partial_inverse(partial_inverse(s))
    assert back == s[:len(back)]


def test_double_inverse_random():
    rng = random.Random(0)
    for _ in range(1000):
        n = rng.randrange(9)
        s = tuple(rng.sample(range(12), n))
        back = partial_inverse(partial_inverse(s))
        assert back == s[:len(back)]


@given(st.integers(1, 6), st.data())
def test_partial_compose_agrees_on_full_permutations(N, data):
    a = tuple(data.draw(st.permutations(range(N))))
    b = tuple(data.draw(st.permutations(range(N))))
    assert partial_compose(a, b) == compose(a, b)
    assert partial_inverse(a) == invert(a)


@pytest.mark.parametrize("degree,count", [(1, 1), (2, 2), (3, 6), (4, 30)])
def test_subgroup_counts(degree, count):
    subs = all_subgroups(degree)
    assert len(subs) == count
    assert all(is_subgroup(H.elements, degree) for H in subs)


def test_cylinders_are_nested_subgroups():
    G = FinitePermGroup.symmetric(4)
    for n, k in itertools.combinations_with_replacement(range(5), 2):
        big, small = cylinder_members(G, sigma(n)), cylinder_members(G, sigma(k))
        assert is_subgroup(big, 4)
        assert small <= big


def test_borel_conditions_examples():
    S5 = FinitePermGroup.symmetric(5)
    c1, c2 = check_borel_conditions(S5, 1, 2)
    assert c1 == c2
    Z4 = FinitePermGroup.generate([(1, 2, 3, 0)], 4)
    assert Z4.is_abelian()
    for n, k in itertools.combinations_with_replacement(range(5), 2):
        assert check_borel_conditions(Z4, n, k) == (True, True)
    with pytest.raises(ValueError):
        check_borel_conditions(Z4, 3, 2)


def test_borel_conditions_agree_on_degree_three():
    for G in all_subgroups(3):
        for n, k in itertools.combinations_with_replacement(range(4), 2):
            c1, c2 = check_borel_conditions(G, n, k)
            assert c1 == c2


def test_group_validation_and_json():
    with pytest.raises(ValueError):
        FinitePermGroup(3, frozenset({(0, 1, 2), (1, 2, 0)}))
    G = FinitePermGroup.generate([(1, 0, 2)], 3)
    assert len(G) == 2
    assert FinitePermGroup.from_json(G.to_json()) == G


@given(st.integers(0, 40), st.integers(0, 40))
def test_cantor_pairing(i, n):
    assert cantor_unpair(cantor_pair(i, n)) == (i, n)


def test_cantor_pairing_is_onto_an_initial_segment():
    codes = sorted(cantor_pair(i, n) for i in range(10) for n in range(10) if i + n < 10)
    assert codes == list(range(55))


def test_embed_single_level():
    G = embed_product([cyclic_table(2)])
    assert G.degree == 2
    assert G.elements == frozenset({(0, 1), (1, 0)})


def test_embed_two_levels():
    G = embed_product([cyclic_table(2), cyclic_table(3)])
    assert len(G) == 6
    assert G.is_abelian()
    supports = [support(g) for g in G.elements]
    dom0 = {cantor_pair(i, 0) for i in range(2)}
    dom1 = {cantor_pair(i, 1) for i in range(3)}
    assert dom0.isdisjoint(dom1)
    assert all(s <= dom0 | dom1 for s in supports)


def test_regular_action_is_free():
    table = [[0, 1, 2, 3, 4, 5], [1, 0, 3, 2, 5, 4], [2, 4, 0, 5, 1, 3],
             [3, 5, 1, 4, 0, 2], [4, 2, 5, 0, 3, 1], [5, 3, 4, 1, 2, 0]]
    check_table(table)
    G = embed_product([table])
    assert len(G) == 6 and not G.is_abelian()
    for g in G.elements:
        if g != sigma(G.degree):
            dom = [cantor_pair(i, 0) for i in range(6)]
            assert all(g[d] != d for d in dom)


def test_bad_tables():
    with pytest.raises(ValueError):
        check_table([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        check_table([[0, 1], [1]])
    with pytest.raises(ValueError):
        embed_product([[[1, 0], [0, 0]]])

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from procount.trees import (Appended, ExplicitTree, FiniteTree, NotInTree, RK, SK, SOmega, SStar,
                            SequenceSpec, Tx, UndeterminedDistance, build_Tx, capacity_inequality,
                            count_level, derivative_structure_check, distance, expand, linf_distance,
                            t_node, tree_spec_from_json, z_prefix)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_sk_level_counts(k):
    F = expand(SK(k), 7)
    assert [len(F.level(n)) for n in range(8)] == [sum(comb(n, j) for j in range(k)) for n in range(8)]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_rk_level_counts(k):
    F = expand(RK(k), 5)
    assert [len(F.level(n)) for n in range(6)] == [1] + [2 ** (k + n - 1) for n in range(1, 6)]


def test_s1_is_one_branch():
    assert expand(SK(1), 4).level(4) == ((0, 0, 0, 0),)


def test_sstar_truncation():
    F = expand(SStar(), 2, width=6)
    assert F.level(1) == ((0,), (2,), (4,))
    assert len(F.level(2)) == 9
    assert SStar().contains((0, 10, 2)) and not SStar().contains((0, 1))


@pytest.mark.parametrize("T", [SK(3), RK(2), SOmega(), Tx(SequenceSpec((1, 2, 3))), SStar()])
def test_expanded_trees_are_pruned(T):
    assert expand(T, 5, 6).check_tree() == []


def test_somega_copies():
    T = SOmega()
    # no copy along z_0; S_1 at t_{1,0}, nothing at t_{1,1}, S_1 at t_{1,2}
    assert T.attach(t_node(0, 0)) is None
    assert T.attach(t_node(1, 0)) == SK(1)
    assert T.attach(t_node(1, 1)) is None
    assert T.attach(t_node(2, 2)) == SK(2)
    assert T.contains((2, 1, 0, 0))
    assert not T.contains((2, 0, 1))
    assert not T.contains((0, 1))


def test_tx_copies_and_classification():
    x = SequenceSpec((2, 0))
    T = Tx(x)
    assert T.attach(t_node(0, 1)) == RK(2)
    assert T.attach(t_node(1, 3)) == RK(0)
    s = t_node(0, 1) + (2 * 3 + 1, 1)
    assert T.contains(s)
    assert T.copy_of(s) == ("R", 0, 0, (0, 0), (3, 1))
    assert T.in_R_copy(0, 0)(s)
    assert T.copy_of((0, 0, 0)) == ("star",)
    assert T.copy_of((2, 1)) == ("S", 1, 0, (2,), (0,))
    with pytest.raises(NotInTree):
        T.locate((0, 0, 9))


def test_tx_level_counts_inside_r_copy():
    x = SequenceSpec.constant(2)
    F = build_Tx(x, 6, 4)
    win = Tx(x).in_R_copy(0, 0)
    # R_2 at t_{0,1} (length 2): levels 3.. hold 4, 8, 16, 32 nodes
    assert [F.count_level(n, win) for n in range(3, 7)] == [4, 8, 16, 32]
    assert count_level(Tx(x), 4, win, width=4) == 8


def test_finite_copies_are_kept_whole():
    F = build_Tx(SequenceSpec.constant(4), 3, width=2)
    kids = F.children(t_node(0, 1))
    assert len(kids) == 2 ** 4 + 1


def test_children_of_lazy_tree():
    assert SStar().children((), 3) == [(0,), (2,), (4,)]
    with pytest.raises(NotInTree):
        RK(1).children((5,), 2)


def test_explicit_and_appended():
    E = ExplicitTree([(), (0,), (0, 0)])
    A = Appended(E, {(0,): SK(2)})
    assert A.contains((0, 1, 1))
    assert A.contains((0, 3))
    assert not A.contains((0, 5))
    with pytest.raises(ValueError):
        ExplicitTree([(), (0, 0)])


def test_distance():
    assert distance((0, 1, 2), (0, 1, 3)) == Fraction(1, 4)
    assert distance((1,), (0,)) == 1
    assert distance((0, 0), (0, 0), identical=True) == 0
    with pytest.raises(UndeterminedDistance):
        distance((0, 0), (0, 0))


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.lists(st.integers(0, 2), min_size=4, max_size=4),
       st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_distance_is_an_ultrametric(a, b, c):
    try:
        ab, bc, ac = distance(a, b), distance(b, c), distance(a, c)
    except UndeterminedDistance:
        return
    assert ac <= max(ab, bc)
    assert ab == distance(b, a)


def test_sequence_spec():
    x = SequenceSpec((5, 1), (2, 3))
    assert x.values(4) == [5, 1, 7, 9]
    assert SequenceSpec.from_json(x.to_json()) == x
    assert linf_distance(SequenceSpec.constant(3), SequenceSpec((0,), (0, 4))) == 3
    assert linf_distance(SequenceSpec.affine(1, 0), SequenceSpec.constant(0)) is None
    with pytest.raises(ValueError):
        SequenceSpec((-1,))


@given(st.integers(0, 6), st.integers(0, 5), st.integers(0, 5))
def test_capacity_inequality(yk, m, extra):
    M = m + extra
    cap, bound, j = capacity_inequality(yk, m, M)
    assert cap == sum(2 ** (yk + i) for i in range(1, j + 1)) // 2
    assert cap < bound
    assert j == M - m + 1


def test_capacity_inequality_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        capacity_inequality(1, 3, 2)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_derivative_of_sk(k):
    assert derivative_structure_check(k, 6)


def test_finite_tree_json_round_trip():
    F = expand(SK(3), 4)
    assert FiniteTree.from_json(F.to_json()) == F
    with pytest.raises(ValueError):
        FiniteTree([[()], [(0, 0)]])


@pytest.mark.parametrize("T", [SStar(), SK(2), RK(3), SOmega(), Tx(SequenceSpec((1,), (1, 0))),
                               ExplicitTree([(), (4,)]), Appended(SK(1), {(0,): RK(1)})])
def test_tree_spec_json(T):
    back = tree_spec_from_json(T.to_json())
    assert expand(back, 4, 4) == expand(T, 4, 4)


def test_z_prefix():
    assert z_prefix(3, 0) == ()
    assert z_prefix(3, 3) == (6, 0, 0)

import pytest
from hypothesis import given, strategies as st

from procount.fp_linalg import (SparseVector, check_prime, inv_mod, rank, rank2, same_span2, scale,
                                span, vec_add)

P = 3
vectors = st.dictionaries(st.integers(0, 4), st.integers(0, P - 1), max_size=5).map(
    lambda d: SparseVector.from_mapping(d, P))


def V(d, p=P):
    return SparseVector.from_mapping(d, p)


def test_vec_add_examples():
    assert vec_add(V({}), V({})) == V({})
    assert vec_add(V({0: 1}), V({0: P - 1})) == V({})
    assert vec_add(V({0: 1, 1: 2}), V({1: 2})) == V({0: 1, 1: 1})


def test_zero_entries_never_stored():
    v = V({0: 3, 1: 0, 2: 4})
    assert v.entries == ((2, 1),)


def test_rank2_examples():
    assert rank2(V({}), V({})) == 0
    assert rank2(V({0: 1}), V({0: 2})) == 1
    assert rank2(V({0: 1}), V({1: 1})) == 2


def test_same_span2_examples():
    e0, e1, e2 = V({0: 1}), V({1: 1}), V({2: 1})
    assert same_span2(e0, e1, e1, e0)
    assert same_span2(e0, e1, V({0: 1, 1: 1}), e1)
    assert not same_span2(e0, e1, e0, e2)


def test_same_span2_against_enumeration():
    e0, e1 = V({0: 1}), V({1: 1})
    assert span([e0, e1]) == span([V({0: 1, 1: 1}), e1])
    assert len(span([e0, e1])) == P ** 2


@given(vectors, vectors, vectors)
def test_addition_is_an_abelian_group(u, v, w):
    assert u + v == v + u
    assert (u + v) + w == u + (v + w)
    assert u + (-u) == SparseVector.zero(P)


@given(vectors, vectors, st.integers(0, P - 1))
def test_rank2_symmetry_and_multiples(u, v, lam):
    assert rank2(u, v) == rank2(v, u)
    assert rank2(u, scale(u, lam)) <= 1
    assert rank2(u, v) == rank([u, v])


@given(vectors, vectors, vectors, vectors)
def test_same_span2_matches_span_enumeration(u, v, s, t):
    assert same_span2(u, v, s, t) == (span([u, v]) == span([s, t]))


@given(vectors, vectors, vectors, vectors, vectors, vectors)
def test_same_span2_is_an_equivalence(a, b, c, d, e, f):
    assert same_span2(a, b, a, b)
    assert same_span2(a, b, c, d) == same_span2(c, d, a, b)
    if same_span2(a, b, c, d) and same_span2(c, d, e, f):
        assert same_span2(a, b, e, f)


def test_prime_checks():
    assert check_prime(5) == 5
    for bad in (1, 2, 9, 15):
        with pytest.raises(ValueError):
            check_prime(bad)
    assert inv_mod(2, 5) == 3
    with pytest.raises(ZeroDivisionError):
        inv_mod(0, 3)


def test_mixed_characteristic_rejected():
    with pytest.raises(ValueError):
        vec_add(V({0: 1}, 3), V({0: 1}, 5))

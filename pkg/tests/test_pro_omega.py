import random

import pytest

from procount.mekler import Morphism, multiply
from procount.pro_omega import (CoherenceError, InverseSystem, InverseSystemError, PreMorphism,
                                apply_P, check_premorphism, compose, derive_phi, equivalent,
                                evaluate_limit, identity_premorphism, is_interval_premorphism, lift,
                                premorphism_failures, random_coherent)
from procount.trees import RK, SK, expand
from procount.unifmaps import PrefixMapFamily, phi_kl


@pytest.fixture(scope="module")
def R1():
    return InverseSystem.from_tree(expand(RK(1), 4))


def interval(sys, phi):
    return PreMorphism(sys, sys, phi, [sys.interval_map(m, n) for n, m in enumerate(phi)])


def test_levels_follow_the_tree(R1):
    assert [len(U.labels) for U in R1.universes] == [1, 2, 4, 8, 16]
    assert R1.onto_problems() == []


def test_interval_maps_compose(R1):
    assert R1.interval_map(3, 1).images == R1.interval_map(2, 1).compose(R1.interval_map(3, 2)).images
    assert R1.interval_map(2, 2).images == Morphism.identity(R1.level(2)).images
    with pytest.raises(InverseSystemError):
        R1.interval_map(1, 2)


def test_sections_split_the_bindings(R1):
    for n in range(R1.depth):
        back = R1.bindings[n].compose(R1.section(n))
        assert back.images == Morphism.identity(R1.level(n)).images


def test_identity_and_interval_premorphisms(R1):
    I = identity_premorphism(R1)
    assert check_premorphism(I)
    J = interval(R1, [1, 2, 3, 4])
    assert check_premorphism(J) and is_interval_premorphism(J)
    assert equivalent(J, identity_premorphism(R1, 3))


def test_corrupted_component_breaks_a_square(R1):
    J = interval(R1, [0, 1, 2, 3])
    U = R1.level(2)
    key = U.generators()[0]
    twisted = Morphism(U, U, {**Morphism.identity(U).images, key: U.gen(key, U.p - 1)})
    bad = J.with_component(2, twisted)
    assert premorphism_failures(bad)
    assert not equivalent(bad, identity_premorphism(R1, 3))


def test_compose_premorphisms(R1):
    J = interval(R1, [1, 2, 3])
    K = interval(R1, [0, 1, 2, 3])
    both = compose(K, J)
    assert both.phi == (1, 2, 3)
    assert is_interval_premorphism(both)
    with pytest.raises(InverseSystemError):
        compose(identity_premorphism(InverseSystem.from_tree(expand(SK(2), 2))), J)


def test_equivalence_can_need_a_deeper_level():
    # two node maps that agree only after restriction to level 0
    T = expand(RK(1), 3)
    A = InverseSystem.from_tree(T)
    swap = {(0,): (1,), (1,): (0,)}
    f = PreMorphism(A, A, [0, 1], [A.interval_map(0, 0), Morphism.induced(swap, A.level(1), A.level(1))])
    assert check_premorphism(f)
    assert not equivalent(f, identity_premorphism(A, 1))
    assert equivalent(f, identity_premorphism(A, 1), upTo=0)


def test_coherent_sequences(R1):
    rng = random.Random(5)
    seq = random_coherent(R1, rng)
    assert evaluate_limit(R1, seq) == seq
    assert apply_P(identity_premorphism(R1), seq) == seq
    broken = list(seq)
    broken[2] = multiply(broken[2], R1.level(2).gen(R1.level(2).generators()[0]))
    with pytest.raises(CoherenceError) as err:
        evaluate_limit(R1, broken)
    assert err.value.level in (1, 2)


def test_lift_passes_through_the_given_element(R1):
    U = R1.level(2)
    g = U.gen(U.generators()[3], 2)
    seq = lift(R1, g, 2)
    assert seq[2] == g
    assert evaluate_limit(R1, seq) == seq


def test_P_is_a_functor_on_samples(R1):
    J = interval(R1, [1, 2, 3])
    K = interval(R1, [0, 1, 2])
    rng = random.Random(0)
    for _ in range(20):
        seq = random_coherent(R1, rng)
        assert apply_P(compose(J, K), seq) == apply_P(K, apply_P(J, seq))


def test_induced_premorphism_from_a_family():
    src, tgt = expand(RK(1), 4), expand(RK(2), 4)
    fam = PrefixMapFamily.from_prefix_function(src, tgt, lambda s: phi_kl(1, 2, s))
    A, B = InverseSystem.from_tree(src), InverseSystem.from_tree(tgt)
    f = PreMorphism.induced(fam, A, B)
    assert check_premorphism(f)
    assert PreMorphism.from_json(f.to_json(), A, B).to_json() == f.to_json()
    D = A.depth
    gammas = [c.compose(A.interval_map(D, m)) for m, c in zip(f.phi, f.components)]
    assert derive_phi(A, gammas) == list(f.phi)


def test_wrong_endpoints_are_rejected(R1):
    with pytest.raises(InverseSystemError):
        PreMorphism(R1, R1, [0, 1], [Morphism.identity(R1.level(0)), Morphism.identity(R1.level(0))])
    with pytest.raises(InverseSystemError):
        PreMorphism(R1, R1, [1, 0], [R1.interval_map(1, 0), R1.interval_map(0, 0)])

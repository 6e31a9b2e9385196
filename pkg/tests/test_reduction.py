import pytest

from procount.mekler import Morphism
from procount.pro_omega import InverseSystem, identity_premorphism
from procount.reduction import (ReductionError, backward, build_group_system, capacity_certificate,
                                find_witness, forward, is_L_morphism, node_square_failures,
                                verify_main_theorem_instance)
from procount.trees import RK, SStar, SequenceSpec, expand
from procount.unifmaps import PrefixMapFamily, build_psi, phi_kl


def phi_pair(k, l, depth):
    src, tgt = expand(RK(k), depth), expand(RK(l), depth)
    F = PrefixMapFamily.from_prefix_function(src, tgt, lambda s: phi_kl(k, l, s))
    G = PrefixMapFamily.from_prefix_function(tgt, src, lambda s: phi_kl(l, k, s))
    return F, G


def test_bindings_are_L_morphisms():
    A = build_group_system(RK(1), depth=3)
    assert all(is_L_morphism(b) for b in A.bindings)
    assert not is_L_morphism(Morphism(A.level(1), A.level(1),
                                      {key: A.level(1).identity() for key in A.level(1).generators()}))


def test_lazy_tree_needs_a_depth():
    with pytest.raises(ReductionError):
        build_group_system(SStar())


def test_forward_then_backward_recovers_the_node_maps():
    F, G = phi_pair(1, 2, 5)
    f, g = forward(F, G)
    F2, G2 = backward(f, g)
    assert F2 == F and G2 == G
    assert node_square_failures(F2) == []


def test_forward_rejects_non_inverse_families():
    F, _ = phi_pair(1, 1, 4)
    src = F.source
    swap = PrefixMapFamily.from_prefix_function(src, src, lambda s: ((1 - s[0],) + s[1:]) if s else ())
    with pytest.raises(ReductionError) as err:
        forward(F, swap)
    assert err.value.stage == "forward"


def test_backward_rejects_star_failures():
    F, G = phi_pair(1, 1, 4)
    f, g = forward(F, G)
    U = f.target.level(1)
    key = U.generators()[0]
    bad = f.with_component(1, Morphism(f.source.level(f.phi[1]), U,
                                       {**f.components[1].images, (key[0], 0): U.gen(key, 2)}))
    with pytest.raises(ReductionError) as err:
        backward(bad, g)
    assert err.value.stage == "backward"
    assert err.value.level is not None


def test_backward_needs_trees():
    A = build_group_system(RK(1), depth=3)
    bare = InverseSystem(A.universes, A.bindings)
    ident = identity_premorphism(bare)
    with pytest.raises(ReductionError) as err:
        backward(ident, ident)
    assert "trees" in err.value.detail


def test_find_witness():
    assert find_witness(SequenceSpec.affine(1, 0), SequenceSpec.constant(0), 3) == 4
    assert find_witness(SequenceSpec((9,)), SequenceSpec.constant(0), 3) == 0
    assert find_witness(SequenceSpec.constant(2), SequenceSpec.constant(0), 3) is None
    assert find_witness(SequenceSpec.affine(2, 1), SequenceSpec.affine(1, 0), 10) == 10


def test_capacity_certificate_for_unrelated_specs():
    cert = capacity_certificate(SequenceSpec.affine(1, 0), SequenceSpec.constant(0), 4, 8)
    assert cert["status"] == "pass"
    assert len(cert["certificates"]) == 10
    assert all(r["exceeds"] for r in cert["certificates"])


def test_related_instance_passes_every_stage():
    report = verify_main_theorem_instance(SequenceSpec.constant(1), SequenceSpec.constant(0), 2, 5, 2)
    assert report["status"] == "pass"
    assert [s["stage"] for s in report["stages"]] == ["psi", "systems", "forward", "star", "identity",
                                                      "backward"]
    assert report["related"]


def test_unrelated_instance_runs_the_converse():
    report = verify_main_theorem_instance(SequenceSpec.affine(1, 0), SequenceSpec.constant(0), None, 3, 4)
    assert report["status"] == "pass"
    assert not report["related"]
    assert report["stages"][0]["stage"] == "converse"


def test_bound_below_the_distance_is_an_error():
    with pytest.raises(ReductionError):
        verify_main_theorem_instance(SequenceSpec.constant(3), SequenceSpec.constant(0), 2, 4)


def test_report_is_deterministic():
    x, y = SequenceSpec((2, 0)), SequenceSpec((0, 1))
    a = verify_main_theorem_instance(x, y, 3, 4, 2)
    b = verify_main_theorem_instance(x, y, 3, 4, 2)
    assert a == b
    psi, _ = build_psi(x, y, 3, 4, 2)
    assert a["stages"][0]["phi"] == list(psi.phi)

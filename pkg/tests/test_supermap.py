import numpy as np
import pytest

from polyslot import (
    Morphism,
    braid,
    compose,
    identity,
    max_entry_diff,
    tensor,
    wire,
)
from polyslot.categories import CategoryTag, haar_unitary
from polyslot.errors import AlreadyConnected, TypeMismatch
from polyslot.supermap import (
    HigherObject,
    InternalSupermap,
    apply,
    discard_reprepare_supermap,
    fix_slots,
    identity_supermap,
    loop_rejection_demo,
    pair_supermap,
    raw_double_contraction,
    seqcomp_supermap,
    slot_arg,
    verify,
)


def test_internal_type_validation():
    h = HigherObject(wire([2]), wire([2]))
    with pytest.raises(TypeMismatch):
        InternalSupermap((h,), h, identity(wire([2])))


def test_identity_supermap_action(rng):
    s = identity_supermap([2])
    u = haar_unitary([2], rng)
    assert max_entry_diff(apply(s, [u]), u) <= 1e-12


def test_identity_supermap_with_extension(rng):
    s = identity_supermap([2])
    u = haar_unitary([2, 3], rng)
    out = apply(s, [slot_arg(u, [3], [3])])
    assert max_entry_diff(out, u) <= 1e-12


def test_seqcomp_action(rng):
    s = seqcomp_supermap([2], [3], [2])
    f = haar_unitary([2], rng)
    f = Morphism(wire([2]), wire([3]), np.vstack([f.mat, np.zeros((1, 2))]))
    g = Morphism(wire([3]), wire([2]), haar_unitary([3], rng).mat[:2])
    assert max_entry_diff(apply(s, [f, g]), compose(g, f)) <= 1e-12


def test_seqcomp_with_extensions(rng):
    s = seqcomp_supermap([2])
    u = haar_unitary([2, 2], rng)
    v = haar_unitary([2, 3], rng)
    out = apply(s, [slot_arg(u, [2], [2]), slot_arg(v, [3], [3])])
    # out: A ++ X1 X2 -> C ++ X1' X2'; build the same circuit by hand
    x1, x2 = wire([2]), wire([3])
    big = tensor(u, identity(x2))                       # A X1 X2 -> B X1' X2
    big = compose(tensor(identity(wire([2])), braid(x1, x2)), big)  # -> B X2 X1'
    big = compose(tensor(v, identity(x1)), big)         # -> C X2' X1'
    big = compose(tensor(identity(wire([2])), braid(x2, x1)), big)  # -> C X1' X2'
    assert max_entry_diff(out, big) <= 1e-12


def test_pair_evaluates_to_swap():
    p = pair_supermap([2])
    out = apply(p, [])
    assert max_entry_diff(out, braid(wire([2]), wire([2]))) == 0.0


def test_fix_slots_matches_full_application(rng):
    s = seqcomp_supermap([2])
    u = haar_unitary([2], rng)
    v = haar_unitary([2], rng)
    partial = fix_slots(s, {0: u})
    assert len(partial.slots) == 1
    assert max_entry_diff(apply(partial, [v]), apply(s, [u, v])) <= 1e-12
    partial2 = fix_slots(s, {1: v})
    assert max_entry_diff(apply(partial2, [u]), apply(s, [u, v])) <= 1e-12


def test_fix_slots_with_extension(rng):
    s = seqcomp_supermap([2])
    u = haar_unitary([2, 3], rng)
    v = haar_unitary([2], rng)
    partial = fix_slots(s, {0: slot_arg(u, [3], [3])})
    assert partial.outer.input.factors == (2, 3)
    assert max_entry_diff(
        apply(partial, [v]), apply(s, [slot_arg(u, [3], [3]), v])
    ) <= 1e-12


def test_wrong_arity_rejected(rng):
    s = seqcomp_supermap([2])
    with pytest.raises(TypeMismatch):
        apply(s, [haar_unitary([2], rng)])


def test_wrong_type_rejected(rng):
    s = identity_supermap([2])
    with pytest.raises(TypeMismatch):
        apply(s, [haar_unitary([3], rng)])


def test_discard_reprepare_action(rng):
    v = haar_unitary([2], rng)
    s = discard_reprepare_supermap([2], v)
    u = haar_unitary([2], rng)
    out = apply(s, [u])
    assert max_entry_diff(out, Morphism(v.dom, v.cod, np.trace(u.mat) * v.mat)) <= 1e-12


def test_verify_passes_identity_and_seqcomp():
    for s in (identity_supermap([2]), seqcomp_supermap([2]), seqcomp_supermap([3])):
        rep = verify(s, n_trials=25, seed=3)
        assert rep.passed, rep.to_json()
        assert rep.max_unitarity_defect <= 1e-9


def test_verify_fails_discard(rng):
    s = discard_reprepare_supermap([2], haar_unitary([2], rng))
    rep = verify(s, n_trials=25, seed=3)
    assert not rep.passed
    assert max(rep.max_unitarity_defect, rep.max_cptp_defect) >= 0.1
    assert rep.worst_case is not None


def test_verify_fqc_identity():
    rep = verify(identity_supermap([2]), cat=CategoryTag.FQC, n_trials=10, seed=3)
    assert rep.passed, rep.to_json()


def test_raw_double_contraction_scalar():
    for d in (2, 3):
        raw = raw_double_contraction(seqcomp_supermap([d]), pair_supermap([d]))
        assert max_entry_diff(raw, Morphism(raw.dom, raw.cod, np.eye(d) / d)) <= 1e-10


def test_loop_rejection_demo():
    demo = loop_rejection_demo(seqcomp_supermap([2]), pair_supermap([2]))
    assert isinstance(demo.rejection, AlreadyConnected)
    assert abs(demo.scalar - 0.5) <= 1e-10
    from polyslot.categories import unitarity_defect

    assert unitarity_defect(demo.unitary_part) <= 1e-10

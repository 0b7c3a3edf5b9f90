import numpy as np
import pytest

from polyslot import (
    Comb,
    apply_comb,
    comb_to_internal,
    compose,
    identity,
    identity_comb,
    max_entry_diff,
    random_unitary_comb,
    slot_to_comb,
    srep_apply,
    srep_check,
    tensor,
    wire,
)
from polyslot.categories import haar_unitary
from polyslot.comb import SrepSupermap, comb_from_json, comb_to_json
from polyslot.errors import NotAComb, TypeMismatch
from polyslot.supermap import (
    apply,
    discard_reprepare_supermap,
    identity_supermap,
    slot_arg,
)


def test_comb_type_validation(rng):
    h = identity_comb([2]).slot
    with pytest.raises(TypeMismatch):
        Comb(h, h, wire([2]), identity(wire([2])), identity(wire([2])))


def test_identity_comb_action(rng):
    c = identity_comb([2])
    u = haar_unitary([2], rng)
    assert max_entry_diff(apply_comb(c, u), u) <= 1e-12


def test_apply_comb_memory_bypasses_slot(rng):
    c = random_unitary_comb([2], [3], rng)
    u = haar_unitary([2], rng)
    want = compose(c.post, compose(tensor(u, identity(wire([3]))), c.pre))
    assert max_entry_diff(apply_comb(c, u), want) <= 1e-12


def test_apply_comb_with_extension(rng):
    c = random_unitary_comb([2], [2], rng)
    phi = haar_unitary([2, 3], rng)
    out = apply_comb(c, phi, ([3], [3]))
    assert out.dom.factors == (2, 2, 3)
    assert out.cod.factors == (2, 2, 3)
    from polyslot.categories import unitarity_defect

    assert unitarity_defect(out) <= 1e-12


def test_comb_internal_roundtrip(rng):
    for a, m in (([2], [2]), ([3], [2]), ([2], [3])):
        c = random_unitary_comb(a, m, rng)
        s = comb_to_internal(c)
        c2 = slot_to_comb(s)
        for _ in range(5):
            u = haar_unitary(a, rng)
            assert max_entry_diff(apply_comb(c2, u), apply_comb(c, u)) <= 1e-8


def test_roundtrip_preserves_extension_action(rng):
    c = random_unitary_comb([2], [2], rng)
    c2 = slot_to_comb(comb_to_internal(c))
    phi = haar_unitary([2, 2], rng)
    assert max_entry_diff(
        apply_comb(c2, phi, ([2], [2])), apply_comb(c, phi, ([2], [2]))
    ) <= 1e-8


def test_loop_style_internal_is_not_a_comb(rng):
    s = discard_reprepare_supermap([2], haar_unitary([2], rng))
    with pytest.raises(NotAComb):
        slot_to_comb(s)


def test_compose_combs(rng):
    from polyslot import compose_combs

    outer = random_unitary_comb([2], [2], rng)
    inner = random_unitary_comb([2], [], rng)  # trivial memory, outer hole [2],[2]
    nested = compose_combs(outer, inner)
    u = haar_unitary([2], rng)
    want = apply_comb(outer, apply_comb(inner, u))
    assert max_entry_diff(apply_comb(nested, u), want) <= 1e-12
    assert nested.memory.factors == (2,)


def test_comb_json_roundtrip(rng):
    c = random_unitary_comb([2], [2], rng)
    c2 = comb_from_json(comb_to_json(c))
    assert max_entry_diff(c.pre, c2.pre) == 0.0
    assert max_entry_diff(c.post, c2.post) == 0.0
    assert c2.memory.factors == (2,)


def test_srep_supermap_from_internal(rng):
    # two-party srep from the sequential-composition supermap
    from polyslot.supermap import seqcomp_supermap

    seq = seqcomp_supermap([2])
    s = SrepSupermap(seq.slots, seq.outer, seq)
    u = haar_unitary([2], rng)
    v = haar_unitary([2], rng)
    out0 = srep_apply(s, [u, v], party=0)
    out1 = srep_apply(s, [u, v], party=1)
    want = compose(v, u)
    assert max_entry_diff(out0, want) <= 1e-9
    assert max_entry_diff(out1, want) <= 1e-9
    rep = srep_check(s, trials=5)
    assert rep["verdict"] == "pass"

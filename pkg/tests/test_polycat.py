import json

import numpy as np
import pytest

from polyslot import (
    check_associativity,
    compose,
    compose_along,
    evaluate,
    max_entry_diff,
    random_unitary_comb,
    sym_action,
    term_from_comb,
    term_from_internal,
    term_tensor,
    unit_term,
    wire,
)
from polyslot.categories import haar_unitary
from polyslot.errors import (
    AlreadyConnected,
    BadPermutation,
    SelfComposition,
    TypeMismatch,
)
from polyslot.polycat import network_from_json
from polyslot.supermap import (
    pair_supermap,
    seqcomp_supermap,
    verify,
)


def test_term_ids_are_fresh():
    t1 = unit_term([2])
    t2 = unit_term([2])
    assert t1.term_id != t2.term_id
    assert not (t1.nodes & t2.nodes)


def test_unit_law(rng):
    t = term_from_comb(random_unitary_comb([2], [2], rng), name="c")
    u = unit_term([2])
    composed = compose_along(t, u, 0)
    phi = haar_unitary([2], rng)
    assert max_entry_diff(evaluate(composed, [phi]), evaluate(t, [phi])) <= 1e-12


def test_compose_along_matches_direct_plugging(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    c = term_from_comb(random_unitary_comb([2], [], rng), name="c")
    composed = compose_along(seq, c, 0)
    u = haar_unitary([2], rng)  # fills c's slot
    v = haar_unitary([2], rng)  # fills seq's second slot
    got = evaluate(composed, [u, v])
    want = compose(v, evaluate(c, [u]))
    assert max_entry_diff(got, want) <= 1e-12


def test_compose_along_leg_one(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    c = term_from_comb(random_unitary_comb([2], [], rng), name="c")
    composed = compose_along(seq, c, 1)
    u = haar_unitary([2], rng)  # seq's first slot
    v = haar_unitary([2], rng)  # c's slot
    got = evaluate(composed, [u, v])
    want = compose(evaluate(c, [v]), u)
    assert max_entry_diff(got, want) <= 1e-12


def test_second_connection_rejected(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    pair = term_from_internal(
        pair_supermap([2]), split_outputs=list(seqcomp_supermap([2]).slots),
        name="pair",
    )
    once = compose_along(seq, pair, 0, 0)
    with pytest.raises(AlreadyConnected):
        compose_along(once, once, 0, 1)


def test_self_composition_rejected(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    with pytest.raises(SelfComposition):
        compose_along(seq, seq, 0)


def test_type_mismatch_rejected(rng):
    seq = term_from_internal(seqcomp_supermap([3]), name="seq")
    c = term_from_comb(random_unitary_comb([2], [], rng), name="c")
    with pytest.raises(TypeMismatch):
        compose_along(seq, c, 0)


def test_term_tensor_evaluates_componentwise(rng):
    t1 = term_from_comb(random_unitary_comb([2], [], rng), name="a")
    t2 = term_from_comb(random_unitary_comb([2], [], rng), name="b")
    both = term_tensor(t1, t2)
    u, v = haar_unitary([2], rng), haar_unitary([2], rng)
    got = evaluate(both, [u, v])
    from polyslot import tensor

    want = tensor(evaluate(t1, [u]), evaluate(t2, [v]))
    assert max_entry_diff(got, want) <= 1e-12


def test_term_tensor_shared_nodes_rejected(rng):
    t = term_from_comb(random_unitary_comb([2], [], rng), name="a")
    with pytest.raises(AlreadyConnected):
        term_tensor(t, t)


def test_sym_action_equivariance(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    swapped = sym_action(seq, [1, 0], [0])
    u, v = haar_unitary([2], rng), haar_unitary([2], rng)
    assert max_entry_diff(evaluate(swapped, [v, u]), evaluate(seq, [u, v])) <= 1e-12


def test_sym_action_bad_perm():
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    with pytest.raises(BadPermutation):
        sym_action(seq, [0, 0], [0])


def test_composed_term_verifies(rng):
    seq = term_from_internal(seqcomp_supermap([2]), name="seq")
    c = term_from_comb(random_unitary_comb([2], [], rng), name="c")
    composed = compose_along(seq, c, 0)
    rep = verify(composed, n_trials=20, seed=5)
    assert rep.passed, rep.to_json()


def test_check_associativity():
    rep = check_associativity(seed=2, trials=10)
    assert rep["verdict"] == "pass", rep
    assert rep["max_deviation"] <= 1e-9


def test_network_from_json_fixture():
    from polyslot.fixtures import fixture_path

    obj = json.loads((fixture_path() / "loop_network.json").read_text())
    live, result = network_from_json(obj["network"])
    assert list(live) == ["once"]
    assert result is None
    once = live["once"]
    with pytest.raises(AlreadyConnected):
        compose_along(once, once, 0, 1)

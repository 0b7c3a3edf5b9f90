import numpy as np
import pytest

from conftest import random_staircase
from polyslot import (
    Morphism,
    PathConstraint,
    check_no_path_unitary,
    contract_path,
    extract_witness,
    identity,
    max_entry_diff,
    reassemble,
    tensor,
    wire,
)
from polyslot.categories import haar_unitary
from polyslot.errors import (
    ConstraintFails,
    NotUnitary,
    PathViolation,
)
from polyslot.pathing import groupoid_sandwich_invariance

STAIR_C = PathConstraint((2,), (0,))


def test_constraint_validation():
    with pytest.raises(ValueError):
        PathConstraint((0, 0), (1,))


def test_product_unitary_has_no_paths(rng):
    u = tensor(haar_unitary([2], rng), haar_unitary([2], rng))
    assert check_no_path_unitary(u, PathConstraint((1,), (0,)))
    assert check_no_path_unitary(u, PathConstraint((0,), (1,)))


def test_staircase_passes_and_roundtrips(rng):
    for _ in range(10):
        phi = random_staircase(rng)
        assert check_no_path_unitary(phi, STAIR_C)
        w = extract_witness(phi, STAIR_C)
        re = reassemble(w.first, w.second, wire([2]), wire([2]))
        assert max_entry_diff(re, phi) <= 1e-8
        assert w.memory.total == 2


def test_haar_unitary_generically_signals(rng):
    failures = 0
    for _ in range(10):
        u = haar_unitary([2, 2], rng)
        if not check_no_path_unitary(u, PathConstraint((1,), (0,))):
            failures += 1
    assert failures >= 9


def test_cnot_signals_control_to_target():
    cnot = Morphism(wire([2, 2]), wire([2, 2]), np.eye(4)[[0, 1, 3, 2]])
    assert not check_no_path_unitary(cnot, PathConstraint((0,), (1,)))


def test_extract_requires_constraint(rng):
    u = haar_unitary([2, 2], rng)
    with pytest.raises(ConstraintFails):
        extract_witness(u, PathConstraint((1,), (0,)))


def test_check_rejects_nonunitary():
    m = Morphism(wire([2, 2]), wire([2, 2]), np.ones((4, 4)))
    with pytest.raises(NotUnitary):
        check_no_path_unitary(m, PathConstraint((1,), (0,)))


def test_trivial_memory_for_products(rng):
    u = tensor(haar_unitary([2], rng), haar_unitary([2], rng))
    w = extract_witness(u, PathConstraint((1,), (0,)))
    assert w.memory.total == 1


def test_contract_path_on_swap():
    a = wire([2])
    sw = Morphism(a + a, a + a, np.eye(4)[[0, 2, 1, 3]])
    # no path from input 1 to output 0? swap sends input 1 to output 0 -> path
    with pytest.raises(PathViolation):
        contract_path(sw, 0, 1, PathConstraint((1,), (0,)))


def test_contract_path_identity_product(rng):
    u = tensor(haar_unitary([2], rng), haar_unitary([2], rng))
    out = contract_path(u, 0, 1, PathConstraint((1,), (0,)))
    # contracting output 0 into input 1 traces the first tensor factor
    assert out.dom.factors == (2,)
    assert out.cod.factors == (2,)


def test_contract_path_requires_coverage(rng):
    u = tensor(haar_unitary([2], rng), haar_unitary([2], rng))
    with pytest.raises(PathViolation):
        contract_path(u, 0, 0, PathConstraint((1,), (0,)))


def test_sandwich_invariance(rng):
    for phi in (random_staircase(rng), haar_unitary([2, 2, 2], rng)):
        v = haar_unitary([2], rng)
        w = haar_unitary([2, 2], rng)
        assert groupoid_sandwich_invariance(phi, v, w, STAIR_C)


def test_witness_blocks_are_isometric(rng):
    phi = random_staircase(rng)
    w = extract_witness(phi, STAIR_C)
    f = w.first.mat
    assert np.allclose(f.conj().T @ f, np.eye(4), atol=1e-8)
    g = w.second.mat
    assert np.allclose(g @ g.conj().T, np.eye(4), atol=1e-8)

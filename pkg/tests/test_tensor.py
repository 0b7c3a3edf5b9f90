import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyslot import (
    Morphism,
    UNIT,
    braid,
    cap,
    compose,
    contract_wire,
    cup,
    dagger,
    identity,
    max_entry_diff,
    morphism_from_json,
    morphism_to_json,
    permute_factors,
    tensor,
    wire,
)
from polyslot.errors import BadPermutation, DimensionMismatch, TypeMismatch


def test_wire_coercion_and_total():
    assert wire(3).factors == (3,)
    assert wire([2, 3]).total == 6
    assert len(wire([2, 3, 4])) == 3
    assert (wire([2]) + wire([3])).factors == (2, 3)
    assert UNIT.total == 1


def test_wire_rejects_nonpositive():
    with pytest.raises(ValueError):
        wire([2, 0])


def test_morphism_shape_check():
    with pytest.raises(TypeMismatch):
        Morphism(wire([2]), wire([2]), np.zeros((3, 2)))


def test_morphism_rejects_nonfinite():
    with pytest.raises(ValueError):
        Morphism(wire([2]), wire([2]), np.array([[np.inf, 0], [0, 1]]))


def test_compose_matches_matrix_product(rng):
    f = Morphism(wire([2]), wire([3]), rng.standard_normal((3, 2)))
    g = Morphism(wire([3]), wire([2]), rng.standard_normal((2, 3)))
    assert np.allclose(compose(g, f).mat, g.mat @ f.mat)
    assert np.allclose((g @ f).mat, g.mat @ f.mat)


def test_compose_type_error():
    with pytest.raises(TypeMismatch):
        compose(identity(wire([3])), identity(wire([2])))


def test_tensor_is_kron(rng):
    f = Morphism(wire([2]), wire([2]), rng.standard_normal((2, 2)))
    g = Morphism(wire([3]), wire([3]), rng.standard_normal((3, 3)))
    assert np.allclose(tensor(f, g).mat, np.kron(f.mat, g.mat))
    assert tensor(f, g).dom.factors == (2, 3)


def test_braid_swaps_basis_states():
    sw = braid(wire([2]), wire([3]))
    for i in range(2):
        for j in range(3):
            v = np.zeros(6)
            v[i * 3 + j] = 1.0
            out = sw.mat @ v
            assert out[j * 2 + i] == 1.0
            assert out.sum() == 1.0


def test_braid_inverse():
    a, b = wire([2]), wire([3])
    assert max_entry_diff(compose(braid(b, a), braid(a, b)), identity(a + b)) == 0.0


def test_permute_factors_gather_semantics(rng):
    f = Morphism(wire([2, 3]), wire([2, 3]), rng.standard_normal((6, 6)))
    p = permute_factors(f, [1, 0], [1, 0])
    assert p.dom.factors == (3, 2)
    back = permute_factors(p, [1, 0], [1, 0])
    assert max_entry_diff(back, f) == 0.0


def test_permute_factors_bad_perm():
    with pytest.raises(BadPermutation):
        permute_factors(identity(wire([2, 2])), [0, 0], [0, 1])


def test_snake_equations():
    for d in ([2], [3], [2, 2]):
        w = wire(d)
        lhs = compose(
            tensor(cap(w), identity(w)), tensor(identity(w), cup(w))
        )
        rhs = compose(
            tensor(identity(w), cap(w)), tensor(cup(w), identity(w))
        )
        assert max_entry_diff(lhs, identity(w)) <= 1e-12
        assert max_entry_diff(rhs, identity(w)) <= 1e-12


def test_contract_wire_is_partial_trace(rng):
    f = Morphism(wire([2, 3]), wire([2, 3]), rng.standard_normal((6, 6)))
    c = contract_wire(f, 0, 0)
    t = f.mat.reshape(2, 3, 2, 3)
    assert np.allclose(c.mat, np.einsum("iaib->ab", t))


def test_contract_wire_dim_mismatch():
    f = identity(wire([2, 3]))
    with pytest.raises(DimensionMismatch):
        contract_wire(f, 0, 1)


def test_dagger_involution(rng):
    f = Morphism(wire([2]), wire([3]), rng.standard_normal((3, 2)) + 1j)
    assert max_entry_diff(dagger(dagger(f)), f) == 0.0


def test_json_roundtrip(rng):
    f = Morphism(
        wire([2, 3]), wire([3]), rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
    )
    g = morphism_from_json(morphism_to_json(f))
    assert g.dom.factors == f.dom.factors
    assert max_entry_diff(f, g) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.data())
def test_compose_associativity(d1, d2, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = Morphism(wire([d1]), wire([d2]), rng.standard_normal((d2, d1)))
    g = Morphism(wire([d2]), wire([d1]), rng.standard_normal((d1, d2)))
    h = Morphism(wire([d1]), wire([d2]), rng.standard_normal((d2, d1)))
    assert max_entry_diff(compose(h, compose(g, f)), compose(compose(h, g), f)) <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(3))), st.data())
def test_permute_factors_composes(perm, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    f = Morphism(wire([2, 3, 2]), wire([2, 3, 2]), rng.standard_normal((12, 12)))
    inv = [perm.index(i) for i in range(3)]
    assert max_entry_diff(
        permute_factors(permute_factors(f, perm, perm), inv, inv), f
    ) == 0.0

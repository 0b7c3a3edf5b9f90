"""Dense complex linear algebra over ordered tensor-factor lists.

Morphisms are matrices indexed by mixed-radix multi-indices, big-endian with
the first factor most significant (the numpy ``reshape``/``kron`` order).
Rows are codomain indices, columns are domain indices.  The empty factor
list is the monoidal unit: states are column vectors, effects row vectors,
scalars 1x1 matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BadPermutation, DimensionMismatch, TypeMismatch

__all__ = [
    "WireType",
    "Morphism",
    "Tolerance",
    "wire",
    "identity",
    "compose",
    "tensor",
    "dagger",
    "braid",
    "permute_factors",
    "cup",
    "cap",
    "contract_wire",
    "approx_eq",
    "max_entry_diff",
    "morphism_to_json",
    "morphism_from_json",
]


@dataclass(frozen=True)
class WireType:
    """An ordered list of tensor factor dimensions, optionally labelled."""

    factors: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        factors = tuple(int(d) for d in self.factors)
        object.__setattr__(self, "factors", factors)
        if any(d < 1 for d in factors):
            raise ValueError(f"factor dimensions must be >= 1, got {factors}")
        if self.labels is not None and len(self.labels) != len(factors):
            raise ValueError("labels must match factor count")

    @property
    def total(self) -> int:
        return math.prod(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __add__(self, other: "WireType") -> "WireType":
        return WireType(self.factors + other.factors)

    def __iter__(self):
        return iter(self.factors)


def wire(spec: "WireType | Sequence[int] | int") -> WireType:
    """Coerce an int, factor list or WireType into a WireType."""
    if isinstance(spec, WireType):
        return spec
    if isinstance(spec, int):
        return WireType((spec,))
    return WireType(tuple(spec))


UNIT = WireType(())


@dataclass(frozen=True)
class Tolerance:
    """Absolute tolerance on the max-entry norm used by every approximate test."""

    abs_tol: float = 1e-9

    def __post_init__(self):
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be nonnegative")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Morphism:
    """A complex matrix together with its domain and codomain wire types."""

    dom: WireType
    cod: WireType
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        object.__setattr__(self, "mat", mat)
        if mat.shape != (self.cod.total, self.dom.total):
            raise TypeMismatch(
                f"matrix shape {mat.shape} does not match "
                f"cod {self.cod.factors} x dom {self.dom.factors}"
            )
        if not (np.all(np.isfinite(mat.real)) and np.all(np.isfinite(mat.imag))):
            raise ValueError("morphism entries must be finite")
        mat.setflags(write=False)

    @property
    def tensor_view(self) -> np.ndarray:
        """The matrix reshaped to one axis per cod factor then per dom factor."""
        return self.mat.reshape(self.cod.factors + self.dom.factors)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)


def morphism(dom, cod, mat) -> Morphism:
    return Morphism(wire(dom), wire(cod), np.asarray(mat, dtype=np.complex128))


def identity(w) -> Morphism:
    w = wire(w)
    return Morphism(w, w, np.eye(w.total, dtype=np.complex128))


def compose(g: Morphism, f: Morphism) -> Morphism:
    """Sequential composition g after f."""
    if f.cod.factors != g.dom.factors:
        raise TypeMismatch(
            f"cannot compose: inner wires {f.cod.factors} vs {g.dom.factors}"
        )
    return Morphism(f.dom, g.cod, g.mat @ f.mat)


def tensor(f: Morphism, g: Morphism) -> Morphism:
    """Parallel composition, f's factors preceding g's."""
    return Morphism(f.dom + g.dom, f.cod + g.cod, np.kron(f.mat, g.mat))


def tensor_all(ms: Iterable[Morphism]) -> Morphism:
    out = identity(UNIT)
    for m in ms:
        out = tensor(out, m)
    return out


def dagger(f: Morphism) -> Morphism:
    return Morphism(f.cod, f.dom, f.mat.conj().T)


def _check_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise BadPermutation(f"{perm} is not a permutation of {n} factors")
    return perm


def permute_factors(f: Morphism, in_perm: Sequence[int], out_perm: Sequence[int]) -> Morphism:
    """Reorder tensor factors; position i of the result takes old factor perm[i]."""
    in_perm = _check_perm(in_perm, len(f.dom))
    out_perm = _check_perm(out_perm, len(f.cod))
    n_out = len(f.cod)
    t = f.tensor_view.transpose(tuple(out_perm) + tuple(n_out + p for p in in_perm))
    new_dom = WireType(tuple(f.dom.factors[p] for p in in_perm))
    new_cod = WireType(tuple(f.cod.factors[p] for p in out_perm))
    return Morphism(new_dom, new_cod, t.reshape(new_cod.total, new_dom.total))


def braid(a, b) -> Morphism:
    """The permutation morphism a (x) b -> b (x) a."""
    a, b = wire(a), wire(b)
    na, nb = len(a), len(b)
    ident = identity(a + b)
    out_perm = list(range(na, na + nb)) + list(range(na))
    return permute_factors(ident, list(range(na + nb)), out_perm)


def cup(w) -> Morphism:
    """The unnormalized maximally entangled state sum_i |i>|i> on w ++ w."""
    w = wire(w)
    d = w.total
    vec = np.eye(d, dtype=np.complex128).reshape(d * d, 1)
    return Morphism(UNIT, w + w, vec)


def cap(w) -> Morphism:
    """The transpose of cup: the effect sum_i <i|<i| on w ++ w."""
    w = wire(w)
    d = w.total
    vec = np.eye(d, dtype=np.complex128).reshape(1, d * d)
    return Morphism(w + w, UNIT, vec)


def contract_wire(f: Morphism, out_factor: int, in_factor: int) -> Morphism:
    """Contract one output factor against one input factor of equal dimension."""
    n_out = len(f.cod)
    if not (0 <= out_factor < n_out and 0 <= in_factor < len(f.dom)):
        raise DimensionMismatch("factor index out of range")
    d_out = f.cod.factors[out_factor]
    d_in = f.dom.factors[in_factor]
    if d_out != d_in:
        raise DimensionMismatch(
            f"cannot contract dimension {d_out} output into dimension {d_in} input"
        )
    t = np.trace(f.tensor_view, axis1=out_factor, axis2=n_out + in_factor)
    new_cod = WireType(tuple(d for i, d in enumerate(f.cod.factors) if i != out_factor))
    new_dom = WireType(tuple(d for i, d in enumerate(f.dom.factors) if i != in_factor))
    return Morphism(new_dom, new_cod, t.reshape(new_cod.total, new_dom.total))


def max_entry_diff(f: Morphism, g: Morphism) -> float:
    if f.dom.factors != g.dom.factors or f.cod.factors != g.cod.factors:
        raise TypeMismatch("cannot compare morphisms of different type")
    return float(np.max(np.abs(f.mat - g.mat))) if f.mat.size else 0.0


def approx_eq(f: Morphism, g: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the max entry magnitude of f - g is within tol."""
    return max_entry_diff(f, g) <= tol.abs_tol


# --- JSON interchange (bit-exact, row-major, big-endian multi-indices) ---


def morphism_to_json(f: Morphism) -> dict:
    return {
        "dom": list(f.dom.factors),
        "cod": list(f.cod.factors),
        "re": f.mat.real.reshape(-1).tolist(),
        "im": f.mat.imag.reshape(-1).tolist(),
    }


def morphism_from_json(obj: dict) -> Morphism:
    dom = wire(obj["dom"])
    cod = wire(obj["cod"])
    re = np.asarray(obj["re"], dtype=np.float64)
    im = np.asarray(obj["im"], dtype=np.float64)
    if re.size != dom.total * cod.total or im.size != re.size:
        raise TypeMismatch("re/im length does not match declared wire types")
    mat = (re + 1j * im).reshape(cod.total, dom.total)
    return Morphism(dom, cod, mat)


def dump_morphism(f: Morphism, fp) -> None:
    json.dump(morphism_to_json(f), fp)


def load_morphism(fp) -> Morphism:
    return morphism_from_json(json.load(fp))

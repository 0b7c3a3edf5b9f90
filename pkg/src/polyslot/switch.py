"""The quantum switch: control-coherent superposition of application orders.

Branch convention: projector k routes the plugged morphisms in the order
given by orderings[k]; for the two-party switch, pi_0 applies phi_1 first,
so Switch(phi_1, phi_2) = pi_0 (x) (phi_2 phi_1) + pi_1 (x) (phi_1 phi_2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .comb import Comb, SrepSupermap
from .errors import BadControl, BadOrderings, TypeMismatch
from .supermap import HigherObject, InternalSupermap
from .tensor import (
    Morphism,
    WireType,
    braid,
    compose,
    identity,
    permute_factors,
    tensor,
    wire,
)

__all__ = [
    "Control",
    "standard_control",
    "build_switch",
    "build_n_switch",
    "switch_comb",
    "switch_closed_form",
]


@dataclass(frozen=True)
class Control:
    """Orthogonal projectors on the control wire; completeness is required."""

    dim_q: int
    projectors: tuple[Morphism, ...]

    def __post_init__(self):
        object.__setattr__(self, "projectors", tuple(self.projectors))
        q = wire([self.dim_q])
        tol = 1e-10
        for p in self.projectors:
            if p.dom.factors != q.factors or p.cod.factors != q.factors:
                raise BadControl("projectors must act on the control wire")
        for k, p in enumerate(self.projectors):
            for l, r in enumerate(self.projectors):
                want = p.mat if k == l else np.zeros_like(p.mat)
                if np.max(np.abs(p.mat @ r.mat - want)) > tol:
                    raise BadControl("projectors are not orthogonal idempotents")
        total = sum(p.mat for p in self.projectors)
        if np.max(np.abs(total - np.eye(self.dim_q))) > tol:
            raise BadControl("projectors do not sum to the identity")

    @property
    def q(self) -> WireType:
        return wire([self.dim_q])


def standard_control(dim_q: int = 2) -> Control:
    projs = []
    q = wire([dim_q])
    for k in range(dim_q):
        m = np.zeros((dim_q, dim_q))
        m[k, k] = 1.0
        projs.append(Morphism(q, q, m))
    return Control(dim_q, tuple(projs))


def _routing_internal(ctrl: Control, a: WireType, orderings) -> InternalSupermap:
    """Internal morphism sum_k pi_k (x) (wire permutation realizing order k)."""
    n = len(orderings[0])
    holes = tuple(HigherObject(a, a) for _ in range(n))
    outer = HigherObject(ctrl.q + a, ctrl.q + a)
    # wire block layout (one block per slot plus the through wire):
    # dom blocks a'_1..a'_n, a ; cod blocks a_1..a_n, a_out
    ident = identity(sum((a for _ in range(n + 1)), wire([])))
    mats = []
    for pi, order in zip(ctrl.projectors, orderings):
        src = [0] * (n + 1)
        src[order[0]] = n
        for i in range(len(order) - 1):
            src[order[i + 1]] = order[i]
        src[n] = order[-1]
        blocks = []
        for j in src:
            blocks.extend(range(j * len(a), (j + 1) * len(a)))
        perm = permute_factors(ident, list(range(len(ident.dom))), blocks)
        # interleave the control: (a_1..a_n, a_out) (x) q -> (a_1..a_n, q, a_out)
        big = tensor(Morphism(ident.dom, ident.dom, perm.mat), pi)
        na = len(a)
        shuffle = list(range(n * na)) + [(n + 1) * na] + list(range(n * na, (n + 1) * na))
        mats.append(permute_factors(big, shuffle, shuffle).mat)
    dom = sum((h.output for h in holes), wire([])) + outer.input
    cod = sum((h.input for h in holes), wire([])) + outer.output
    return InternalSupermap(holes, outer, Morphism(dom, cod, sum(mats)))


def build_switch(ctrl: Control, a) -> SrepSupermap:
    """The two-party quantum switch as an srep supermap with internal backend."""
    if len(ctrl.projectors) != 2:
        raise BadControl("the two-party switch needs exactly two projectors")
    return build_n_switch(ctrl, a, [(1, 2), (2, 1)])


def build_n_switch(ctrl: Control, a, orderings) -> SrepSupermap:
    """N-party switch: sum_k pi_k (x) (composition in the order orderings[k])."""
    aw = wire(a)
    orderings = [tuple(o) for o in orderings]
    if len(orderings) != len(ctrl.projectors):
        raise BadOrderings("need one ordering per control projector")
    n = len(orderings[0]) if orderings else 0
    for o in orderings:
        if sorted(o) != list(range(1, n + 1)):
            raise BadOrderings(f"{o} is not an ordering of parties 1..{n}")
    zero_based = [tuple(p - 1 for p in o) for o in orderings]
    internal = _routing_internal(ctrl, aw, zero_based)
    return SrepSupermap(internal.slots, internal.outer, internal)


def switch_closed_form(ctrl: Control, phis, orderings=None) -> Morphism:
    """sum_k pi_k (x) phi_{o_k(n)} ... phi_{o_k(1)} on trivial extensions."""
    phis = list(phis)
    if orderings is None:
        orderings = [(1, 2), (2, 1)]
    a = phis[0].dom
    out = np.zeros((ctrl.dim_q * a.total,) * 2, dtype=np.complex128)
    for pi, order in zip(ctrl.projectors, orderings):
        m = np.eye(a.total, dtype=np.complex128)
        for p in order:
            m = phis[p - 1].mat @ m
        out += np.kron(pi.mat, m)
    return Morphism(ctrl.q + a, ctrl.q + a, out)


def switch_comb(ctrl: Control, a, party: int, fixed: Morphism) -> Comb:
    """Closed-form comb seen by one party of the two-party switch.

    For party 2 with phi_1 fixed: memory Q, pre = braided (pi_0 (x) phi_1 +
    pi_1 (x) id), post = (pi_0 (x) id + pi_1 (x) phi_1) after braiding back.
    """
    if party not in (1, 2):
        raise TypeMismatch("party must be 1 or 2")
    aw = wire(a)
    if fixed.dom.factors != aw.factors or fixed.cod.factors != aw.factors:
        raise TypeMismatch("fixed morphism must act on the slot wire")
    q = ctrl.q
    p0, p1 = ctrl.projectors
    f = fixed.mat
    i = np.eye(aw.total)
    if party == 2:
        pre_blocks = np.kron(p0.mat, f) + np.kron(p1.mat, i)
        post_blocks = np.kron(p0.mat, i) + np.kron(p1.mat, f)
    else:
        pre_blocks = np.kron(p0.mat, i) + np.kron(p1.mat, f)
        post_blocks = np.kron(p0.mat, f) + np.kron(p1.mat, i)
    qa = Morphism(q + aw, q + aw, pre_blocks)
    aq_post = Morphism(q + aw, q + aw, post_blocks)
    pre = compose(braid(q, aw), qa)           # Q A -> A Q (memory last)
    post = compose(aq_post, braid(aw, q))     # A Q -> Q A -> Q A
    h = HigherObject(aw, aw)
    return Comb(h, HigherObject(q + aw, q + aw), q, pre, post)

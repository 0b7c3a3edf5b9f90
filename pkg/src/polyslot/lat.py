"""Locally-applicable transformations as black-box function families.

A Lat maps a morphism phi: A ++ X -> A' ++ X' to a morphism
B ++ X -> B' ++ X' for every extension pair (X, X'), naturally in local
dressings of the extension wires.  The S^loop and S^V families below are
genuine Lats that are nevertheless not implementable by supermaps, and
their order-dependence on the swap is the standard interchange failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .categories import haar_unitary, is_unitary
from .comb import Comb, apply_comb
from .errors import NotUnitary, TypeMismatch
from .pathing import PathConstraint, check_no_path_unitary
from .supermap import HigherObject, InternalSupermap, apply
from .tensor import (
    DEFAULT_TOL,
    UNIT,
    Morphism,
    Tolerance,
    WireType,
    compose,
    identity,
    max_entry_diff,
    permute_factors,
    tensor,
    wire,
)

__all__ = [
    "Lat",
    "lat_from_comb",
    "lat_from_internal",
    "s_loop",
    "s_v",
    "broken_lat",
    "check_naturality",
    "check_slot_commutation",
    "interchange_failure_demo",
    "eval_on_factors",
]


@dataclass(frozen=True)
class Lat:
    """A function family indexed by extension wires (naturality is tested, not assumed)."""

    slot: HigherObject
    outer: HigherObject
    eval: Callable[[WireType, WireType, Morphism], Morphism] = field(repr=False)
    name: str = ""

    def __call__(self, phi: Morphism, ext=(UNIT, UNIT)) -> Morphism:
        x, xp = wire(ext[0]), wire(ext[1])
        if phi.dom.factors != (self.slot.input + x).factors or phi.cod.factors != (
            self.slot.output + xp
        ).factors:
            raise TypeMismatch(
                f"morphism typed {phi.dom.factors}->{phi.cod.factors} does not fit "
                f"Lat slot with extension ({x.factors},{xp.factors})"
            )
        return self.eval(x, xp, phi)


def lat_from_comb(c: Comb) -> Lat:
    return Lat(c.slot, c.outer, lambda x, xp, phi: apply_comb(c, phi, (x, xp)),
               name="comb")


def lat_from_internal(s: InternalSupermap) -> Lat:
    if len(s.slots) != 1:
        raise TypeMismatch("lat_from_internal expects a single-slot supermap")
    return Lat(s.slots[0], s.outer, lambda x, xp, phi: apply(s, [(phi, x, xp)]),
               name="internal")


def _slot_constraint(a: WireType, x: WireType, xp: WireType) -> PathConstraint:
    """No path from the slot-block inputs to the slot-block outputs."""
    return PathConstraint(tuple(range(len(a))), tuple(range(len(a))))


def _trace_slot_block(a: WireType, phi: Morphism, x: WireType, xp: WireType) -> Morphism:
    """Close the slot outputs onto the slot inputs: the time-loop contraction."""
    t = phi.mat.reshape(a.total, xp.total, a.total, x.total)
    return Morphism(x, xp, np.einsum("apaq->pq", t))


def s_loop(a, tol: Tolerance = DEFAULT_TOL) -> Lat:
    """Apply a time-loop whenever the input's signalling structure permits.

    If phi: A ++ X -> A ++ X' carries no path from the A inputs to the A
    outputs, close that loop and pass a fresh identity wire through;
    otherwise return phi unchanged.  A genuine Lat, but no supermap acts
    this way on any nontrivial A.
    """
    aw = wire(a)
    h = HigherObject(aw, aw)

    def ev(x, xp, phi):
        if not is_unitary(phi, Tolerance(max(tol.abs_tol, 1e-8))):
            raise NotUnitary("S^loop is defined on unitaries")
        if check_no_path_unitary(phi, _slot_constraint(aw, x, xp), tol):
            return tensor(identity(aw), _trace_slot_block(aw, phi, x, xp))
        return phi

    return Lat(h, h, ev, name="s_loop")


def s_v(a, v: Morphism | None = None, w: Morphism | None = None,
        tol: Tolerance = DEFAULT_TOL) -> Lat:
    """Dress the slot wires with V before and W after when no path crosses them.

    Defaults: V the cyclic shift and W the Fourier matrix on A, so that the
    applied correction W V is far from the identity.
    """
    aw = wire(a)
    d = aw.total
    if v is None:
        v = Morphism(aw, aw, np.eye(d)[:, list(range(1, d)) + [0]])
    if w is None:
        om = np.exp(2j * np.pi / d)
        w = Morphism(aw, aw, om ** np.outer(np.arange(d), np.arange(d)) / np.sqrt(d))
    if not (is_unitary(v) and is_unitary(w)):
        raise NotUnitary("S^V requires unitary dressings")
    h = HigherObject(aw, aw)

    def ev(x, xp, phi):
        if not is_unitary(phi, Tolerance(max(tol.abs_tol, 1e-8))):
            raise NotUnitary("S^V is defined on unitaries")
        if check_no_path_unitary(phi, _slot_constraint(aw, x, xp), tol):
            return compose(tensor(w, identity(xp)), compose(phi, tensor(v, identity(x))))
        return phi

    return Lat(h, h, ev, name="s_v")


def broken_lat(a) -> Lat:
    """A deliberately non-natural family: branches on a raw matrix entry."""
    aw = wire(a)
    h = HigherObject(aw, aw)
    d = aw.total
    w = Morphism(aw, aw, np.diag([(-1.0) ** k for k in range(d)]))

    def ev(x, xp, phi):
        if abs(phi.mat[0, 0]) > 0.5:
            return compose(tensor(w, identity(xp)), phi)
        return phi

    return Lat(h, h, ev, name="broken")


def eval_on_factors(t: Lat, phi: Morphism, in_pos, out_pos) -> Lat:
    """Apply a Lat to the listed factor positions of phi, the rest as extension."""
    in_pos, out_pos = tuple(in_pos), tuple(out_pos)
    rest_in = tuple(i for i in range(len(phi.dom)) if i not in in_pos)
    rest_out = tuple(i for i in range(len(phi.cod)) if i not in out_pos)
    fronted = permute_factors(phi, in_pos + rest_in, out_pos + rest_out)
    x = wire([phi.dom.factors[i] for i in rest_in])
    xp = wire([phi.cod.factors[i] for i in rest_out])
    res = t(fronted, (x, xp))
    # restore the original interleaving, with the Lat's outer wires replacing the slot
    in_order = list(in_pos) + list(rest_in)
    out_order = list(out_pos) + list(rest_out)
    if len(t.outer.input) != len(t.slot.input) or len(t.outer.output) != len(t.slot.output):
        return res  # outer arity differs; no canonical reinterleaving
    inv_in = [in_order.index(i) for i in range(len(phi.dom))]
    inv_out = [out_order.index(i) for i in range(len(phi.cod))]
    return permute_factors(res, inv_in, inv_out)


def _haar_or_ginibre(dom: WireType, cod: WireType, rng) -> Morphism:
    if dom.total == cod.total:
        return Morphism(dom, cod, haar_unitary(dom, rng).mat)
    z = rng.standard_normal((cod.total, dom.total)) + 1j * rng.standard_normal(
        (cod.total, dom.total)
    )
    return Morphism(dom, cod, z / np.sqrt(2 * dom.total))


def _branch_true_probe(a: WireType, x: WireType, rng) -> Morphism | None:
    """A unitary A++X -> A++X with no path from the A block to the A block."""
    if a.total != x.total:
        return None
    sw = permute_factors(
        identity(a + x),
        list(range(len(a) + len(x))),
        list(range(len(a), len(a) + len(x))) + list(range(len(a))),
    )
    sw = Morphism(a + x, a + x, sw.mat)
    u = tensor(haar_unitary(a, rng), haar_unitary(x, rng))
    u = Morphism(a + x, a + x, u.mat)
    return compose(u, sw)


def check_naturality(t: Lat, seed: int = 0, trials: int = 50,
                     tol: Tolerance = DEFAULT_TOL) -> dict:
    """Test the defining LAT square on random inputs and extension dressings."""
    a, ap = t.slot.input, t.slot.output
    worst = 0.0
    tested = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        x = wire([2])
        phis = [_haar_or_ginibre(a + x, ap + x, rng)]
        if a.factors == ap.factors:
            phis.append(Morphism(a + x, ap + x, np.eye((a + x).total)))
            probe = _branch_true_probe(a, x, rng)
            if probe is not None:
                phis.append(Morphism(a + x, ap + x, probe.mat))
        xd = haar_unitary(x, rng)
        xpd = haar_unitary(x, rng)
        for phi in phis:
            dressed = compose(tensor(identity(ap), xpd), compose(phi, tensor(identity(a), xd)))
            try:
                lhs = t(dressed, (x, x))
                rhs = compose(
                    tensor(identity(t.outer.output), xpd),
                    compose(t(phi, (x, x)), tensor(identity(t.outer.input), xd)),
                )
            except NotUnitary:
                continue
            worst = max(worst, max_entry_diff(lhs, rhs))
            tested += 1
    verdict = "pass" if worst <= max(tol.abs_tol, 1e-9) * 10 else "fail"
    return {"name": t.name, "trials": tested, "max_deviation": worst, "verdict": verdict}


def check_slot_commutation(s: Lat, t: Lat, seed: int = 0, trials: int = 20,
                           tol: Tolerance = DEFAULT_TOL) -> dict:
    """Compare both orders of applying s and t to disjoint parts of shared processes."""
    a_s, a_t = s.slot.input, t.slot.input
    ap_s, ap_t = s.slot.output, t.slot.output
    ns, nt = len(a_s), len(a_t)
    s_in = tuple(range(ns))
    t_in = tuple(range(ns, ns + nt))
    s_out = tuple(range(len(ap_s)))
    t_out = tuple(range(len(ap_s), len(ap_s) + len(ap_t)))
    worst = 0.0
    tested = 0
    battery = []
    rng0 = np.random.default_rng(seed)
    if (a_s + a_t).total == (ap_s + ap_t).total:
        if a_s.total == a_t.total:
            sw = permute_factors(
                identity(a_s + a_t),
                list(range(ns + nt)),
                list(range(ns, ns + nt)) + list(range(ns)),
            )
            battery.append(Morphism(a_s + a_t, ap_s + ap_t, sw.mat))
        for _ in range(trials):
            battery.append(
                Morphism(a_s + a_t, ap_s + ap_t, haar_unitary(a_s + a_t, rng0).mat)
            )
    for phi in battery:
        try:
            first_s = eval_on_factors(t, eval_on_factors(s, phi, s_in, s_out), t_in, t_out)
            first_t = eval_on_factors(s, eval_on_factors(t, phi, t_in, t_out), s_in, s_out)
        except NotUnitary:
            continue
        worst = max(worst, max_entry_diff(first_s, first_t))
        tested += 1
    verdict = "pass" if worst <= max(tol.abs_tol, 1e-9) * 10 else "fail"
    return {"left": s.name, "right": t.name, "trials": tested,
            "max_deviation": worst, "verdict": verdict}


def interchange_failure_demo(dim: int = 2, v: Morphism | None = None,
                             w: Morphism | None = None) -> tuple[Morphism, Morphism]:
    """Both orders of (S^loop on the left, S^V on the right) acting on the swap.

    Returns (loop-then-v, v-then-loop): the first is the identity, the second
    the identity dressed by W V, so they differ whenever W V != id.
    """
    if dim < 2:
        raise ValueError("demo needs dim >= 2")
    a = wire([dim])
    loop = s_loop(a)
    sv = s_v(a, v, w)
    sw = permute_factors(identity(a + a), [0, 1], [1, 0])
    sw = Morphism(a + a, a + a, sw.mat)
    loop_first = eval_on_factors(sv, eval_on_factors(loop, sw, (0,), (0,)), (1,), (1,))
    v_first = eval_on_factors(loop, eval_on_factors(sv, sw, (1,), (1,)), (0,), (0,))
    return loop_first, v_first

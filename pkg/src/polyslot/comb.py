"""Combs (circuits with a hole), srep supermaps, and slot-to-comb extraction.

A comb realizes a single-slot supermap as pre/post circuitry with a side
memory the plugged morphism never touches.  The extraction direction probes
an internal supermap on the swap, checks the resulting no-pathing
constraint, and reads the comb off the staircase witness.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .categories import haar_unitary
from .errors import (
    InconsistentBackend,
    NotAComb,
    NotUnitary,
    ReassemblyFail,
    TypeMismatch,
)
from .pathing import PathConstraint, check_no_path_unitary, extract_witness
from .supermap import HigherObject, InternalSupermap, SlotArg, apply, fix_slots, slot_arg
from .tensor import (
    DEFAULT_TOL,
    UNIT,
    Morphism,
    Tolerance,
    WireType,
    braid,
    compose,
    identity,
    max_entry_diff,
    morphism_from_json,
    morphism_to_json,
    permute_factors,
    tensor,
    wire,
)

__all__ = [
    "Comb",
    "SrepSupermap",
    "apply_comb",
    "compose_combs",
    "comb_to_internal",
    "slot_to_comb",
    "srep_apply",
    "srep_check",
    "identity_comb",
    "random_unitary_comb",
    "comb_to_json",
    "comb_from_json",
]


@dataclass(frozen=True)
class Comb:
    """pre: B -> A (x) M, the hole A -> A', then post: A' (x) M -> B'."""

    slot: HigherObject
    outer: HigherObject
    memory: WireType
    pre: Morphism = field(repr=False)
    post: Morphism = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "memory", wire(self.memory))
        a, ap = self.slot.input, self.slot.output
        if self.pre.dom.factors != self.outer.input.factors:
            raise TypeMismatch("pre must consume the outer input wire")
        if self.pre.cod.factors != (a + self.memory).factors:
            raise TypeMismatch("pre must produce slot input ++ memory")
        if self.post.dom.factors != (ap + self.memory).factors:
            raise TypeMismatch("post must consume slot output ++ memory")
        if self.post.cod.factors != self.outer.output.factors:
            raise TypeMismatch("post must produce the outer output wire")


def apply_comb(c: Comb, phi: Morphism, ext=(UNIT, UNIT)) -> Morphism:
    """Plug phi (typed A++X -> A'++X') into the hole; memory bypasses phi."""
    x, xp = wire(ext[0]), wire(ext[1])
    a, ap = c.slot.input, c.slot.output
    if phi.dom.factors != (a + x).factors or phi.cod.factors != (ap + xp).factors:
        raise TypeMismatch(
            f"morphism typed {phi.dom.factors}->{phi.cod.factors} does not fit hole "
            f"[{a.factors},{ap.factors}] with extension ({x.factors},{xp.factors})"
        )
    m = c.memory
    stages = [
        tensor(c.pre, identity(x)),                 # B X -> A M X
        tensor(identity(a), braid(m, x)),           # A M X -> A X M
        tensor(phi, identity(m)),                   # A X M -> A' X' M
        tensor(identity(ap), braid(xp, m)),         # A' X' M -> A' M X'
        tensor(c.post, identity(xp)),               # A' M X' -> B' X'
    ]
    out = stages[0]
    for s in stages[1:]:
        out = compose(s, out)
    return out


def compose_combs(outer: Comb, inner: Comb) -> Comb:
    """Nest inner's hole inside outer's; memories concatenate outer-first."""
    if (
        inner.outer.input.factors != outer.slot.input.factors
        or inner.outer.output.factors != outer.slot.output.factors
    ):
        raise TypeMismatch("inner comb's outer hole must match outer comb's slot")
    a, ap = inner.slot.input, inner.slot.output
    mo, mi = outer.memory, inner.memory
    pre = compose(
        tensor(identity(a), braid(mi, mo)),
        compose(tensor(inner.pre, identity(mo)), outer.pre),
    )  # C -> B Mo -> A Mi Mo -> A Mo Mi
    post = compose(
        outer.post,
        compose(tensor(inner.post, identity(mo)),
                tensor(identity(ap), braid(mo, mi))),
    )  # A' Mo Mi -> A' Mi Mo -> B' Mo -> C'
    return Comb(inner.slot, outer.outer, mo + mi, pre, post)


def comb_to_internal(c: Comb) -> InternalSupermap:
    """Bend the comb into one internal morphism A' (x) B -> A (x) B'."""
    a, ap = c.slot.input, c.slot.output
    m = c.memory
    internal = compose(
        tensor(identity(a), c.post),
        compose(
            tensor(identity(a), braid(m, ap)),
            compose(tensor(c.pre, identity(ap)), braid(ap, c.outer.input)),
        ),
    )
    return InternalSupermap((c.slot,), c.outer, internal)


def slot_to_comb(
    s: InternalSupermap,
    tol: Tolerance = DEFAULT_TOL,
    battery: int = 20,
    seed: int = 0,
) -> Comb:
    """Extract the comb realizing a single-slot unitary-preserving supermap.

    Probes the supermap on the swap with extension X = A', X' = A; absence
    of a path from the dangling A' input to the dangling A output is exactly
    the comb condition, and its staircase witness is the (pre, post) pair.
    """
    if len(s.slots) != 1:
        raise TypeMismatch("slot_to_comb expects exactly one slot")
    h = s.slots[0]
    a, ap = h.input, h.output
    probe = apply(s, [slot_arg(braid(a, ap), ap, a)])  # B A' -> B' A
    nb, nbp = len(s.outer.input), len(s.outer.output)
    constraint = PathConstraint(
        tuple(range(nb, nb + len(ap))), tuple(range(nbp, nbp + len(a)))
    )
    try:
        ok = check_no_path_unitary(probe, constraint, tol)
    except NotUnitary as exc:
        raise NotAComb(f"swap probe is not unitary: {exc}") from exc
    if not ok:
        raise NotAComb("swap probe signals from the slot output to the slot input")
    w = extract_witness(probe, constraint, tol)
    # canonical witness blocks: first: B -> A (x) M, second: M (x) A' -> B'
    pre = w.first
    post = compose(w.second, braid(ap, w.memory))
    comb = Comb(h, s.outer, w.memory, pre, post)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(battery):
        phi = _random_slot_fill(a, ap, rng)
        worst = max(worst, max_entry_diff(apply_comb(comb, phi), apply(s, [phi])))
    if worst > max(tol.abs_tol, 1e-8):
        raise ReassemblyFail(worst)
    return comb


def _random_slot_fill(a: WireType, ap: WireType, rng) -> Morphism:
    """Haar unitary when the hole is square, Ginibre matrix otherwise."""
    if a.total == ap.total:
        return Morphism(a, ap, haar_unitary(a, rng).mat)
    z = rng.standard_normal((ap.total, a.total)) + 1j * rng.standard_normal(
        (ap.total, a.total)
    )
    return Morphism(a, ap, z / np.sqrt(2 * a.total))


def identity_comb(a, ap=None) -> Comb:
    aw = wire(a)
    apw = wire(a if ap is None else ap)
    h = HigherObject(aw, apw)
    return Comb(h, h, UNIT, identity(aw), identity(apw))


def random_unitary_comb(a, m, rng, ap=None) -> Comb:
    """Haar pre and post around a hole [A, A'] with memory M."""
    aw, mw = wire(a), wire(m)
    apw = wire(a if ap is None else ap)
    h = HigherObject(aw, apw)
    outer = HigherObject(aw + mw, apw + mw)
    pre = haar_unitary(aw + mw, rng)
    post = haar_unitary(apw + mw, rng)
    return Comb(h, outer, mw, pre, post)


# --- single-party representable supermaps --------------------------------


@dataclass
class SrepSupermap:
    """A supermap every party of which sees a comb once the others are fixed.

    backend is either a callable (party, fixed_args) -> Comb giving the
    closed-form comb family, or an InternalSupermap from which per-party
    combs are derived on demand (and cached) via slot_to_comb.
    """

    slots: tuple[HigherObject, ...]
    outer: HigherObject
    backend: object = field(repr=False)
    tol: Tolerance = DEFAULT_TOL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.slots = tuple(self.slots)

    def comb_for(self, party: int, fixed: list[SlotArg]) -> Comb:
        """The comb seen by one party once all other parties are plugged."""
        if len(fixed) != len(self.slots) - 1:
            raise TypeMismatch("need one fixed argument per other party")
        if callable(self.backend):
            return self.backend(party, fixed)
        key = (party,) + tuple(
            hashlib.sha256(np.ascontiguousarray(phi.mat).tobytes()).hexdigest()
            for phi, _, _ in fixed
        )
        if key not in self._cache:
            others = [j for j in range(len(self.slots)) if j != party]
            reduced = fix_slots(self.backend, dict(zip(others, fixed)))
            self._cache[key] = slot_to_comb(reduced, self.tol)
        return self._cache[key]

    def apply(self, args) -> Morphism:
        return srep_apply(self, args)


def _normalize(slots, args) -> list[SlotArg]:
    if len(args) != len(slots):
        raise TypeMismatch(f"expected {len(slots)} arguments, got {len(args)}")
    return [a if not isinstance(a, Morphism) else (a, UNIT, UNIT) for a in args]


def _eval_via_party(s: SrepSupermap, args: list[SlotArg], party: int) -> Morphism:
    fixed = [args[j] for j in range(len(args)) if j != party]
    comb = s.comb_for(party, fixed)
    phi, x, xp = args[party]
    out = apply_comb(comb, phi, (x, xp))
    # comb outer is B ++ fixed extensions; party extension arrives last.
    # Reorder dangling extension wires back to slot order.
    return _reorder_exts(s, out, args, party)


def _reorder_exts(s: SrepSupermap, out: Morphism, args: list[SlotArg], party: int) -> Morphism:
    nb, nbp = len(s.outer.input), len(s.outer.output)
    order = [j for j in range(len(args)) if j != party] + [party]
    # current dangling blocks follow `order`; target is slot order 0..n-1.
    def perm(block_lens, want):
        pos, starts = nb if want == "in" else nbp, {}
        for j, ln in zip(order, block_lens):
            starts[j] = pos
            pos = pos + ln
        res = list(range(nb if want == "in" else nbp))
        for j in range(len(args)):
            ln = block_lens[order.index(j)]
            res.extend(range(starts[j], starts[j] + ln))
        return res

    in_lens = [len(args[j][1]) for j in order]
    out_lens = [len(args[j][2]) for j in order]
    return permute_factors(out, perm(in_lens, "in"), perm(out_lens, "out"))


def srep_apply(s: SrepSupermap, args, party: int = 0) -> Morphism:
    args = _normalize(s.slots, args)
    if not s.slots:
        raise TypeMismatch("srep supermap needs at least one party")
    return _eval_via_party(s, args, party)


def srep_check(s: SrepSupermap, seed: int = 0, trials: int = 10,
               tol: Tolerance = DEFAULT_TOL) -> dict:
    """Cross-validate the per-party comb evaluations on Haar inputs."""
    worst = 0.0
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        args = [slot_arg(_random_slot_fill(h.input, h.output, rng)) for h in s.slots]
        base = _eval_via_party(s, args, 0)
        for p in range(1, len(s.slots)):
            worst = max(worst, max_entry_diff(_eval_via_party(s, args, p), base))
    threshold = max(tol.abs_tol, 1e-9) * 10
    if worst > threshold:
        raise InconsistentBackend(
            f"party evaluations disagree by {worst:.3e} (> {threshold:.1e})"
        )
    return {"trials": trials, "parties": len(s.slots),
            "max_disagreement": worst, "verdict": "pass"}


# --- JSON ----------------------------------------------------------------


def _hole_to_json(h: HigherObject) -> dict:
    return {"input": list(h.input.factors), "output": list(h.output.factors)}


def _hole_from_json(obj: dict) -> HigherObject:
    return HigherObject(wire(obj["input"]), wire(obj["output"]))


def comb_to_json(c: Comb) -> dict:
    return {
        "pre": morphism_to_json(c.pre),
        "post": morphism_to_json(c.post),
        "memory": list(c.memory.factors),
        "slot": _hole_to_json(c.slot),
        "outer": _hole_to_json(c.outer),
    }


def comb_from_json(obj: dict) -> Comb:
    return Comb(
        _hole_from_json(obj["slot"]),
        _hole_from_json(obj["outer"]),
        wire(obj["memory"]),
        morphism_from_json(obj["pre"]),
        morphism_from_json(obj["post"]),
    )

"""Internal-morphism supermaps: application, verification, enrichment examples.

An internal supermap stores a single morphism
S_int: A_1' ... A_n' (x) B  ->  A_1 ... A_n (x) B'
whose slot wires are contracted against plugged morphisms.  Application is a
pure tensor contraction; category preservation is a verified property, not a
structural one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .categories import (
    CategoryTag,
    ChoiMatrix,
    cptp_defect,
    haar_unitary,
    random_cptp_kraus,
    unitarity_defect,
)
from .errors import TypeMismatch
from .tensor import (
    DEFAULT_TOL,
    UNIT,
    Morphism,
    Tolerance,
    WireType,
    braid,
    identity,
    morphism_to_json,
    tensor,
    wire,
)

__all__ = [
    "HigherObject",
    "InternalSupermap",
    "FunctionSupermap",
    "SlotArg",
    "VerificationReport",
    "apply",
    "fix_slots",
    "verify",
    "identity_supermap",
    "seqcomp_supermap",
    "pair_supermap",
    "discard_reprepare_supermap",
    "loop_rejection_demo",
]


@dataclass(frozen=True)
class HigherObject:
    """A hole type [A, A']: the wire pair a plugged morphism must match."""

    input: WireType
    output: WireType

    def __post_init__(self):
        object.__setattr__(self, "input", wire(self.input))
        object.__setattr__(self, "output", wire(self.output))


def hole(a, b=None) -> HigherObject:
    return HigherObject(wire(a), wire(a if b is None else b))


# A plugged argument: the morphism plus its extension wires (X, X').
SlotArg = tuple[Morphism, WireType, WireType]


def slot_arg(phi: Morphism, ext_in=UNIT, ext_out=UNIT) -> SlotArg:
    return (phi, wire(ext_in), wire(ext_out))


def _normalize_args(slots: Sequence[HigherObject], args) -> list[SlotArg]:
    if len(args) != len(slots):
        raise TypeMismatch(f"expected {len(slots)} arguments, got {len(args)}")
    out = []
    for s, a in zip(slots, args):
        if isinstance(a, Morphism):
            a = (a, UNIT, UNIT)
        phi, x, xp = a[0], wire(a[1]), wire(a[2])
        if phi.dom.factors != (s.input + x).factors or phi.cod.factors != (
            s.output + xp
        ).factors:
            raise TypeMismatch(
                f"argument typed {phi.dom.factors}->{phi.cod.factors} does not fit "
                f"slot [{s.input.factors},{s.output.factors}] with extension "
                f"({x.factors},{xp.factors})"
            )
        out.append((phi, x, xp))
    return out


@dataclass(frozen=True)
class InternalSupermap:
    """A supermap realized by one internal morphism plus contraction semantics."""

    slots: tuple[HigherObject, ...]
    outer: HigherObject
    internal: Morphism = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        want_dom = sum((s.output for s in self.slots), UNIT) + self.outer.input
        want_cod = sum((s.input for s in self.slots), UNIT) + self.outer.output
        if (
            self.internal.dom.factors != want_dom.factors
            or self.internal.cod.factors != want_cod.factors
        ):
            raise TypeMismatch(
                f"internal morphism typed {self.internal.dom.factors}->"
                f"{self.internal.cod.factors}, expected {want_dom.factors}->"
                f"{want_cod.factors}"
            )

    def apply(self, args) -> Morphism:
        return apply(self, args)


@dataclass(frozen=True)
class FunctionSupermap:
    """A supermap given by an opaque (pure, multilinear) application function."""

    slots: tuple[HigherObject, ...]
    outer: HigherObject
    fn: Callable[[list[SlotArg]], Morphism] = field(repr=False)
    name: str = ""

    def apply(self, args) -> Morphism:
        return self.fn(_normalize_args(self.slots, args))


def apply(s: InternalSupermap, args) -> Morphism:
    """Contract the internal morphism against the plugged arguments.

    Each slot's A output of the internal feeds the argument's A input and the
    argument's A' output feeds the internal's A' input; extension wires pass
    straight through.  Result: B ++ X_1 ... X_n -> B' ++ X_1' ... X_n'.
    """
    args = _normalize_args(s.slots, args)
    n = len(s.slots)
    d_a = [h.input.total for h in s.slots]
    d_ap = [h.output.total for h in s.slots]
    d_b, d_bp = s.outer.input.total, s.outer.output.total

    # integer einsum labels
    nxt = [0]

    def lab():
        nxt[0] += 1
        return nxt[0] - 1

    a = [lab() for _ in range(n)]
    ap = [lab() for _ in range(n)]
    x = [lab() for _ in range(n)]
    xp = [lab() for _ in range(n)]
    b, bp = lab(), lab()

    internal_t = s.internal.mat.reshape(tuple(d_a) + (d_bp,) + tuple(d_ap) + (d_b,))
    operands = [internal_t, a + [bp] + ap + [b]]
    for i, (phi, xw, xpw) in enumerate(args):
        t = phi.mat.reshape(d_ap[i], xpw.total, d_a[i], xw.total)
        operands += [t, [ap[i], xp[i], a[i], x[i]]]
    out_sub = [bp] + xp + [b] + x
    res = np.einsum(*operands, out_sub)

    dom = s.outer.input + sum((xw for (_, xw, _) in args), UNIT)
    cod = s.outer.output + sum((xpw for (_, _, xpw) in args), UNIT)
    return Morphism(dom, cod, res.reshape(cod.total, dom.total))


def fix_slots(s: InternalSupermap, fixed: dict[int, "SlotArg | Morphism"]) -> InternalSupermap:
    """Partially apply: plug the given slots, leaving the rest open.

    The fixed arguments' extension wires join the outer hole, input
    extensions after B and output extensions after B', in slot order.
    """
    norm: dict[int, SlotArg] = {}
    for idx, a in fixed.items():
        if not 0 <= idx < len(s.slots):
            raise TypeMismatch(f"no slot {idx}")
        norm[idx] = _normalize_args([s.slots[idx]], [a])[0]
    keep = [j for j in range(len(s.slots)) if j not in norm]
    fix = sorted(norm)

    n = len(s.slots)
    d_a = [h.input.total for h in s.slots]
    d_ap = [h.output.total for h in s.slots]
    nxt = [0]

    def lab():
        nxt[0] += 1
        return nxt[0] - 1

    a = [lab() for _ in range(n)]
    ap = [lab() for _ in range(n)]
    x = {k: lab() for k in fix}
    xp = {k: lab() for k in fix}
    b, bp = lab(), lab()

    internal_t = s.internal.mat.reshape(
        tuple(d_a) + (s.outer.output.total,) + tuple(d_ap) + (s.outer.input.total,)
    )
    operands = [internal_t, a + [bp] + ap + [b]]
    for k in fix:
        phi, xw, xpw = norm[k]
        t = phi.mat.reshape(d_ap[k], xpw.total, d_a[k], xw.total)
        operands += [t, [ap[k], xp[k], a[k], x[k]]]
    out_sub = [a[j] for j in keep] + [bp] + [xp[k] for k in fix] \
        + [ap[j] for j in keep] + [b] + [x[k] for k in fix]
    res = np.einsum(*operands, out_sub)

    new_in = s.outer.input + sum((norm[k][1] for k in fix), UNIT)
    new_out = s.outer.output + sum((norm[k][2] for k in fix), UNIT)
    dom = sum((s.slots[j].output for j in keep), UNIT) + new_in
    cod = sum((s.slots[j].input for j in keep), UNIT) + new_out
    return InternalSupermap(
        tuple(s.slots[j] for j in keep),
        HigherObject(new_in, new_out),
        Morphism(dom, cod, res.reshape(cod.total, dom.total)),
    )


# --- canonical supermaps -------------------------------------------------


def identity_supermap(a, ap=None) -> InternalSupermap:
    """The unit supermap [A, A'] -> [A, A']."""
    h = hole(a, ap)
    return InternalSupermap((h,), h, braid(h.output, h.input))


def seqcomp_supermap(a, b=None, c=None) -> InternalSupermap:
    """The sequential-composition supermap [A,B][B,C] -> [A,C]."""
    aw = wire(a)
    bw = wire(a if b is None else b)
    cw = wire(a if c is None else c)
    # internal: B (x) C (x) A -> A (x) B (x) C routing |b, c, a> -> |a, b, c|
    dims = (bw.total, cw.total, aw.total)
    mat = np.eye(math.prod(dims)).reshape(dims + dims).transpose(2, 0, 1, 3, 4, 5)
    mat = mat.reshape(math.prod(dims), math.prod(dims))
    return InternalSupermap(
        (HigherObject(aw, bw), HigherObject(bw, cw)),
        HigherObject(aw, cw),
        Morphism(bw + cw + aw, aw + bw + cw, mat),
    )


def pair_supermap(a) -> InternalSupermap:
    """The cup-pair state (): -> [A,A][A,A]: two holes joined end to end.

    Evaluating the outer hole gives the swap: hole 1's input arrives from
    hole 2's output and vice versa.
    """
    aw = wire(a)
    return InternalSupermap(
        (),
        HigherObject(aw + aw, aw + aw),
        braid(aw, aw),
    )


def discard_reprepare_supermap(a, v: Morphism) -> InternalSupermap:
    """Pseudo-supermap closing the slot on itself and emitting a fixed unitary.

    Not a supermap: the internal contraction traces the plugged morphism's
    slot wires, which leaves the unitary groupoid on generic inputs.
    """
    aw = wire(a)
    d = aw.total
    loop = np.eye(d).reshape(d, d)  # delta contracting A' against A
    mat = np.einsum("ij,pq->ipjq", loop, v.mat).reshape(d * v.cod.total, d * v.dom.total)
    return InternalSupermap(
        (HigherObject(aw, aw),),
        HigherObject(v.dom, v.cod),
        Morphism(aw + v.dom, aw + v.cod, mat),
    )


# --- verification --------------------------------------------------------


@dataclass
class VerificationReport:
    category: str
    trials: int
    structured_cases: int
    max_unitarity_defect: float
    max_cptp_defect: float
    verdict: str
    seed: int
    worst_case: dict | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "trials": self.trials,
            "structured_cases": self.structured_cases,
            "max_unitarity_defect": self.max_unitarity_defect,
            "max_cptp_defect": self.max_cptp_defect,
            "verdict": self.verdict,
            "seed": self.seed,
            "worst_case": self.worst_case,
            "notes": self.notes,
        }


def _ext_pair(slot: HigherObject, k: int) -> tuple[WireType, WireType]:
    """Extension wires making A (x) X and A' (x) X' equal total dimension."""
    da, dap = slot.input.total, slot.output.total
    g = math.gcd(da, dap)
    x, xp = k * (dap // g), k * (da // g)
    return (UNIT if x == 1 else wire([x]), UNIT if xp == 1 else wire([xp]))


def _structured_battery(slots: Sequence[HigherObject], rng) -> list[list[SlotArg]]:
    """Fixed non-random probes: identities, swaps, controlled gates, products."""
    cases: list[list[SlotArg]] = []
    # identity (square slots only)
    if all(s.input.total == s.output.total for s in slots):
        cases.append(
            [slot_arg(identity(s.input)) if s.input.factors == s.output.factors
             else slot_arg(Morphism(s.input, s.output, np.eye(s.input.total)))
             for s in slots]
        )
    # the swap probe with X = A', X' = A
    cases.append(
        [slot_arg(braid(s.input, s.output), s.output, s.input) for s in slots]
    )
    # product morphisms: Haar on the slot tensor a Haar dressing on a dim-2 extension
    prods = []
    for i, s in enumerate(slots):
        if s.input.total != s.output.total:
            prods = None
            break
        u = haar_unitary(s.input, np.random.default_rng([7, i]))
        u = Morphism(s.input, s.output, u.mat)
        v = haar_unitary([2], np.random.default_rng([11, i]))
        prods.append(slot_arg(tensor(u, v), wire([2]), wire([2])))
    if prods:
        cases.append(prods)
    # controlled-NOT style probe on qubit slots
    if all(s.input.total == 2 and s.output.total == 2 for s in slots):
        cnot = np.eye(4)[[0, 1, 3, 2]]
        cases.append(
            [slot_arg(Morphism(s.input + wire([2]), s.output + wire([2]), cnot),
                      wire([2]), wire([2]))
             for s in slots]
        )
    return cases


def _fu_sample(slots, schedule, rng) -> list[SlotArg]:
    args = []
    for s in slots:
        k = int(rng.choice(schedule))
        x, xp = _ext_pair(s, k)
        u = haar_unitary(s.input + x, rng)
        args.append((Morphism(s.input + x, s.output + xp, u.mat), x, xp))
    return args


def _kraus_product_choi(applier, kraus_lists, exts) -> ChoiMatrix:
    """Output Choi of a pure multilinear applier fed Kraus-decomposed channels."""
    vecs = []
    sample = None
    for combo in itertools.product(*kraus_lists):
        out = applier([(k, x, xp) for k, (x, xp) in zip(combo, exts)])
        sample = out
        vecs.append(out.mat.T.reshape(-1, 1))
    j = sum(v @ v.conj().T for v in vecs)
    return ChoiMatrix(sample.dom, sample.cod, j)


def verify(
    s,
    cat: CategoryTag = CategoryTag.FU,
    n_trials: int = 100,
    ext_dims_schedule: Sequence[int] | None = None,
    seed: int = 0,
    tol: Tolerance = DEFAULT_TOL,
) -> VerificationReport:
    """Probabilistic (FU) or sampled-channel (FQC) category-preservation check.

    ``s`` may be an InternalSupermap or any object exposing ``slots``,
    ``outer`` and ``apply(args)`` with pure multilinear semantics.
    """
    slots, applier = s.slots, s.apply
    schedule = list(ext_dims_schedule) if ext_dims_schedule else [1, 2]
    if not ext_dims_schedule:
        schedule += [max(h.output.total for h in slots)] if slots else []
    max_u = 0.0
    max_c = 0.0
    worst = None
    notes = [f"extension dimension schedule {schedule}"]

    def record(defect, args, kind):
        nonlocal max_u, max_c, worst
        prev = max(max_u, max_c)
        if kind == "unitarity":
            max_u = max(max_u, defect)
        else:
            max_c = max(max_c, defect)
        if defect > prev and defect > tol.abs_tol:
            worst = {
                "defect": defect,
                "kind": kind,
                "args": [morphism_to_json(a[0]) for a in args],
            }

    structured = _structured_battery(slots, np.random.default_rng(seed))
    if cat is CategoryTag.FU:
        for args in structured:
            record(unitarity_defect(applier(args)), args, "unitarity")
        for t in range(n_trials):
            rng = np.random.default_rng([seed, t])
            args = _fu_sample(slots, schedule, rng)
            record(unitarity_defect(applier(args)), args, "unitarity")
    elif cat is CategoryTag.FQC:
        for t in range(n_trials):
            rng = np.random.default_rng([seed, t])
            kraus_lists, exts = [], []
            for h in slots:
                k = int(rng.choice(schedule))
                x, xp = _ext_pair(h, k)
                kraus_lists.append(random_cptp_kraus(h.input + x, h.output + xp, rng))
                exts.append((x, xp))
            jc = _kraus_product_choi(applier, kraus_lists, exts)
            cp, tp = cptp_defect(jc)
            record(max(cp, tp), [(k[0], x, xp) for k, (x, xp) in zip(kraus_lists, exts)],
                   "cptp")
        notes.append("FQC membership checked on sampled Stinespring channels")
    else:
        raise TypeMismatch("verify supports the FU and FQC categories")

    defect = max(max_u, max_c)
    return VerificationReport(
        category=cat.value,
        trials=n_trials,
        structured_cases=len(structured),
        max_unitarity_defect=max_u,
        max_cptp_defect=max_c,
        verdict="pass" if defect <= max(tol.abs_tol, 1e-9) * 10 else "fail",
        seed=seed,
        worst_case=worst,
        notes=notes,
    )


# --- the Appendix-style loop rejection demo ------------------------------


@dataclass
class LoopDemoResult:
    rejection: Exception | None
    raw: Morphism
    scalar: float
    unitary_part: Morphism

    def to_json(self) -> dict:
        return {
            "rejection": type(self.rejection).__name__ if self.rejection else None,
            "raw": morphism_to_json(self.raw),
            "scalar": self.scalar,
        }


def raw_double_contraction(seqcomp: InternalSupermap, pair: InternalSupermap) -> Morphism:
    """Close both hole pairs of the cup-pair into the composition supermap.

    The first closure is legal plugging; the second is implemented with
    unit-normalized entangled pairs on each of its two wires, contributing a
    1/d factor per wire pair.  The result falls outside the unitaries by
    exactly that scalar.
    """
    s, p = seqcomp.internal, pair.internal
    d1 = seqcomp.slots[0].input.total
    d2 = seqcomp.slots[1].input.total
    db = seqcomp.outer.input.total
    dbp = seqcomp.outer.output.total
    dp1 = seqcomp.slots[0].output.total
    dp2 = seqcomp.slots[1].output.total
    st = s.mat.reshape(d1, d2, dbp, dp1, dp2, db)
    pt = p.mat.reshape(dp1, dp2, d1, d2)
    raw = np.einsum("abpcdq,cdab->pq", st, pt) / (d2 * dp2)
    return Morphism(seqcomp.outer.input, seqcomp.outer.output, raw)


def loop_rejection_demo(seqcomp: InternalSupermap, pair: InternalSupermap) -> LoopDemoResult:
    """Attempt the forbidden double-leg composition and report the 1/d scalar."""
    from . import polycat
    from .errors import AlreadyConnected

    t = polycat.term_from_internal(seqcomp, name="seqcomp")
    st = polycat.term_from_internal(
        pair, split_outputs=list(seqcomp.slots), name="pair"
    )
    once = polycat.compose_along(t, st, 0, 0)
    rejection = None
    try:
        polycat.compose_along(once, once, 0, 1)
    except AlreadyConnected as exc:
        rejection = exc

    raw = raw_double_contraction(seqcomp, pair)
    dim = raw.dom.total
    scale = math.sqrt(max(np.trace(raw.mat.conj().T @ raw.mat).real / dim, 0.0))
    unitary_part = Morphism(raw.dom, raw.cod, raw.mat / scale) if scale > 0 else raw
    return LoopDemoResult(rejection, raw, float(scale), unitary_part)

"""Polycategorical composition of supermap terms with the one-wire loop guard.

Terms carry lists of input and output hole types; the output list is
evaluated as the single tensored hole.  Composition connects one output leg
of one term to one input leg of another, and is refused whenever the two
terms share history — the discipline that makes time-loops unformable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .comb import comb_to_internal, random_unitary_comb
from .errors import (
    AlreadyConnected,
    BadPermutation,
    SelfComposition,
    TypeMismatch,
)
from .supermap import (
    FunctionSupermap,
    HigherObject,
    InternalSupermap,
    identity_supermap,
    pair_supermap,
    seqcomp_supermap,
)
from .tensor import (
    DEFAULT_TOL,
    UNIT,
    Morphism,
    Tolerance,
    WireType,
    max_entry_diff,
    morphism_from_json,
    permute_factors,
    tensor,
    wire,
)

__all__ = [
    "PolyTerm",
    "make_term",
    "unit_term",
    "term_from_internal",
    "term_from_comb",
    "term_tensor",
    "compose_along",
    "sym_action",
    "evaluate",
    "check_associativity",
    "network_from_json",
]

_ids = itertools.count()


def _fresh_id(name: str) -> str:
    return f"{name}#{next(_ids)}"


def _combined_hole(outputs) -> HigherObject:
    return HigherObject(
        sum((o.input for o in outputs), UNIT),
        sum((o.output for o in outputs), UNIT),
    )


@dataclass(frozen=True)
class PolyTerm:
    """A typed poly-morphism: input legs, output legs, and an applier backend."""

    term_id: str
    inputs: tuple[HigherObject, ...]
    outputs: tuple[HigherObject, ...]
    backend: object = field(repr=False)
    name: str = ""
    input_nodes: tuple[str, ...] = ()
    output_nodes: tuple[str, ...] = ()
    nodes: frozenset = frozenset()
    edges: frozenset = frozenset()

    def __post_init__(self):
        hole = _combined_hole(self.outputs)
        b = self.backend
        if tuple(h.input.factors for h in b.slots) != tuple(
            h.input.factors for h in self.inputs
        ) or tuple(h.output.factors for h in b.slots) != tuple(
            h.output.factors for h in self.inputs
        ):
            raise TypeMismatch("backend slots do not match the term's input legs")
        if (
            b.outer.input.factors != hole.input.factors
            or b.outer.output.factors != hole.output.factors
        ):
            raise TypeMismatch("backend outer hole does not match the output legs")

    # verify() duck-typing
    @property
    def slots(self):
        return self.backend.slots

    @property
    def outer(self):
        return self.backend.outer

    def apply(self, args) -> Morphism:
        return self.backend.apply(args)


def make_term(inputs, outputs, backend, name: str = "term") -> PolyTerm:
    nid = _fresh_id(name)
    return PolyTerm(
        term_id=nid,
        inputs=tuple(inputs),
        outputs=tuple(outputs),
        backend=backend,
        name=name,
        input_nodes=(nid,) * len(tuple(inputs)),
        output_nodes=(nid,) * len(tuple(outputs)),
        nodes=frozenset([nid]),
    )


def unit_term(a, ap=None) -> PolyTerm:
    s = identity_supermap(a, ap)
    return make_term(s.slots, (s.outer,), s, name="unit")


def term_from_internal(s: InternalSupermap, split_outputs=None, name: str = "internal") -> PolyTerm:
    """Wrap an internal supermap; split_outputs may factor the outer hole into legs."""
    outputs = tuple(split_outputs) if split_outputs else (s.outer,)
    return make_term(s.slots, outputs, s, name=name)


def term_from_comb(c, name: str = "comb") -> PolyTerm:
    s = comb_to_internal(c)
    return make_term(s.slots, (s.outer,), s, name=name)


def evaluate(t: PolyTerm, args) -> Morphism:
    return t.backend.apply(args)


def _regroup(m: Morphism, dom_blocks, cod_blocks, dom_order, cod_order) -> Morphism:
    """Permute whole named factor blocks of a morphism into a target order."""

    def perm(blocks, order):
        by_name = dict(blocks)
        starts, pos = {}, 0
        for name, w in blocks:
            starts[name] = pos
            pos += len(w)
        out = []
        for name in order:
            out.extend(range(starts[name], starts[name] + len(by_name[name])))
        return out

    return permute_factors(m, perm(dom_blocks, dom_order), perm(cod_blocks, cod_order))


def _cat_in(holes) -> WireType:
    return sum((h.input for h in holes), UNIT)


def _cat_out(holes) -> WireType:
    return sum((h.output for h in holes), UNIT)


def compose_along(t: PolyTerm, s: PolyTerm, leg: int, s_leg: int = 0) -> PolyTerm:
    """Feed output leg ``s_leg`` of s into input leg ``leg`` of t.

    Input legs of the result are ordered D, A, E (t's legs before the
    composition wire, then s's legs, then t's remaining legs); output legs
    are B, F, C (s's legs before the wire, t's legs, s's remaining legs).
    """
    if not 0 <= leg < len(t.inputs):
        raise TypeMismatch(f"term has no input leg {leg}")
    if not 0 <= s_leg < len(s.outputs):
        raise TypeMismatch(f"term has no output leg {s_leg}")
    producer = s.output_nodes[s_leg]
    consumer = t.input_nodes[leg]
    if t.nodes & s.nodes:
        if producer == consumer:
            raise SelfComposition("cannot plug a term's output back into itself")
        raise AlreadyConnected(
            "terms already share a wire; a second connection would form a loop"
        )
    m_obj = s.outputs[s_leg]
    want = t.inputs[leg]
    if (
        m_obj.input.factors != want.input.factors
        or m_obj.output.factors != want.output.factors
    ):
        raise TypeMismatch(
            f"output leg [{m_obj.input.factors},{m_obj.output.factors}] does not "
            f"match input leg [{want.input.factors},{want.output.factors}]"
        )

    n_d, n_a = leg, len(s.inputs)
    b_out, c_out = s.outputs[:s_leg], s.outputs[s_leg + 1:]
    new_inputs = t.inputs[:leg] + s.inputs + t.inputs[leg + 1:]
    new_outputs = b_out + t.outputs + c_out

    def fn(args):
        d_args = args[:n_d]
        a_args = args[n_d:n_d + n_a]
        e_args = args[n_d + n_a:]
        m = s.backend.apply(a_args)
        xa_in = sum((x for _, x, _ in a_args), UNIT)
        xa_out = sum((xp for _, _, xp in a_args), UNIT)
        dom_blocks = [("B", _cat_in(b_out)), ("M", m_obj.input),
                      ("C", _cat_in(c_out)), ("XA", xa_in)]
        cod_blocks = [("B", _cat_out(b_out)), ("M", m_obj.output),
                      ("C", _cat_out(c_out)), ("XA", xa_out)]
        m2 = _regroup(m, dom_blocks, cod_blocks,
                      ["M", "B", "C", "XA"], ["M", "B", "C", "XA"])
        ext_in = _cat_in(b_out) + _cat_in(c_out) + xa_in
        ext_out = _cat_out(b_out) + _cat_out(c_out) + xa_out
        out = t.backend.apply(list(d_args) + [(m2, ext_in, ext_out)] + list(e_args))
        xd_in = sum((x for _, x, _ in d_args), UNIT)
        xd_out = sum((xp for _, _, xp in d_args), UNIT)
        xe_in = sum((x for _, x, _ in e_args), UNIT)
        xe_out = sum((xp for _, _, xp in e_args), UNIT)
        dom_blocks = [("F", t.backend.outer.input), ("XD", xd_in),
                      ("B", _cat_in(b_out)), ("C", _cat_in(c_out)),
                      ("XA", xa_in), ("XE", xe_in)]
        cod_blocks = [("F", t.backend.outer.output), ("XD", xd_out),
                      ("B", _cat_out(b_out)), ("C", _cat_out(c_out)),
                      ("XA", xa_out), ("XE", xe_out)]
        order = ["B", "F", "C", "XD", "XA", "XE"]
        return _regroup(out, dom_blocks, cod_blocks, order, order)

    backend = FunctionSupermap(new_inputs, _combined_hole(new_outputs), fn,
                               name=f"{t.name}∘{s.name}")
    return PolyTerm(
        term_id=_fresh_id(f"{t.name}.{s.name}"),
        inputs=new_inputs,
        outputs=new_outputs,
        backend=backend,
        name=f"{t.name}∘{s.name}",
        input_nodes=t.input_nodes[:leg] + s.input_nodes + t.input_nodes[leg + 1:],
        output_nodes=s.output_nodes[:s_leg] + t.output_nodes + s.output_nodes[s_leg + 1:],
        nodes=t.nodes | s.nodes,
        edges=t.edges | s.edges | {(producer, consumer)},
    )


def term_tensor(t1: PolyTerm, t2: PolyTerm, name: str | None = None) -> PolyTerm:
    """Place two unconnected terms side by side as one term."""
    if t1.nodes & t2.nodes:
        raise AlreadyConnected("cannot tensor terms that share a wire")
    n1 = len(t1.inputs)
    new_inputs = t1.inputs + t2.inputs
    new_outputs = t1.outputs + t2.outputs

    def fn(args):
        m1 = t1.backend.apply(args[:n1])
        m2 = t2.backend.apply(args[n1:])
        x1_in = sum((x for _, x, _ in args[:n1]), UNIT)
        x1_out = sum((xp for _, _, xp in args[:n1]), UNIT)
        x2_in = sum((x for _, x, _ in args[n1:]), UNIT)
        x2_out = sum((xp for _, _, xp in args[n1:]), UNIT)
        big = tensor(m1, m2)
        dom_blocks = [("O1", t1.backend.outer.input), ("X1", x1_in),
                      ("O2", t2.backend.outer.input), ("X2", x2_in)]
        cod_blocks = [("O1", t1.backend.outer.output), ("X1", x1_out),
                      ("O2", t2.backend.outer.output), ("X2", x2_out)]
        order = ["O1", "O2", "X1", "X2"]
        return _regroup(big, dom_blocks, cod_blocks, order, order)

    name = name or f"{t1.name}⊗{t2.name}"
    backend = FunctionSupermap(new_inputs, _combined_hole(new_outputs), fn, name=name)
    return PolyTerm(
        term_id=_fresh_id(name),
        inputs=new_inputs,
        outputs=new_outputs,
        backend=backend,
        name=name,
        input_nodes=t1.input_nodes + t2.input_nodes,
        output_nodes=t1.output_nodes + t2.output_nodes,
        nodes=t1.nodes | t2.nodes,
        edges=t1.edges | t2.edges,
    )


def _check_perm(perm, n):
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(n)):
        raise BadPermutation(f"{perm} is not a permutation of {n} legs")
    return perm


def sym_action(t: PolyTerm, in_perm, out_perm) -> PolyTerm:
    """Permute input and output legs; position i of the result takes old leg perm[i]."""
    in_perm = _check_perm(in_perm, len(t.inputs))
    out_perm = _check_perm(out_perm, len(t.outputs))
    new_inputs = tuple(t.inputs[p] for p in in_perm)
    new_outputs = tuple(t.outputs[p] for p in out_perm)

    def fn(args):
        orig = [args[in_perm.index(j)] for j in range(len(t.inputs))]
        res = t.backend.apply(orig)
        dom_blocks = [(f"o{j}", t.outputs[j].input) for j in range(len(t.outputs))] + [
            (f"x{j}", orig[j][1]) for j in range(len(orig))
        ]
        cod_blocks = [(f"o{j}", t.outputs[j].output) for j in range(len(t.outputs))] + [
            (f"x{j}", orig[j][2]) for j in range(len(orig))
        ]
        order = [f"o{p}" for p in out_perm] + [f"x{p}" for p in in_perm]
        return _regroup(res, dom_blocks, cod_blocks, order, order)

    backend = FunctionSupermap(new_inputs, _combined_hole(new_outputs), fn,
                               name=f"sym({t.name})")
    return PolyTerm(
        term_id=_fresh_id(f"sym.{t.name}"),
        inputs=new_inputs,
        outputs=new_outputs,
        backend=backend,
        name=f"sym({t.name})",
        input_nodes=tuple(t.input_nodes[p] for p in in_perm),
        output_nodes=tuple(t.output_nodes[p] for p in out_perm),
        nodes=t.nodes,
        edges=t.edges,
    )


def check_associativity(seed: int = 0, trials: int = 25,
                        tol: Tolerance = DEFAULT_TOL,
                        include_switch: bool = True) -> dict:
    """Numerically compare both orders of plugging two terms into a 2-leg term."""
    from .categories import haar_unitary

    worst = 0.0
    cases = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        if include_switch and i % 5 == 0:
            from .switch import build_switch, standard_control

            q = term_from_internal(build_switch(standard_control(2), [2]).backend,
                                   name="switch")
        else:
            q = term_tensor(
                term_from_comb(random_unitary_comb([2], [], rng), name="q1"),
                term_from_comb(random_unitary_comb([2], [], rng), name="q2"),
            )
        s = term_from_comb(random_unitary_comb([2], [], rng), name="s")
        r = term_from_comb(random_unitary_comb([2], [], rng), name="r")
        left = compose_along(compose_along(q, s, 0), r, 1 + len(s.inputs) - 1)
        # composing r into q's second leg first, then s into the first
        right = compose_along(compose_along(q, r, 1), s, 0)
        args = [haar_unitary([2], rng) for _ in left.inputs]
        lv = evaluate(left, args)
        rv = evaluate(right, args)
        # both results carry the same legs; left output order is F..C of s then r
        worst = max(worst, max_entry_diff(lv, _match_outputs(rv, right, left)))
        cases += 1
        # sym_action equivariance on the two-input term
        pv = evaluate(sym_action(q, [1, 0], list(range(len(q.outputs)))),
                      [args[1], args[0]])
        qv = evaluate(q, [args[0], args[1]])
        worst = max(worst, max_entry_diff(pv, qv))
    verdict = "pass" if worst <= max(tol.abs_tol, 1e-9) * 10 else "fail"
    return {"trials": cases, "max_deviation": worst, "verdict": verdict}


def _match_outputs(v: Morphism, src: PolyTerm, dst: PolyTerm) -> Morphism:
    """Permute src's output blocks (and ext blocks, here trivial) to dst's order."""
    if tuple(o.input.factors for o in src.outputs) == tuple(
        o.input.factors for o in dst.outputs
    ):
        return v
    # outputs are the same multiset of legs traced by node ids; realign by node id
    order = [src.output_nodes.index(n) for n in dst.output_nodes]
    dom_blocks = [(f"o{j}", src.outputs[j].input) for j in range(len(src.outputs))]
    cod_blocks = [(f"o{j}", src.outputs[j].output) for j in range(len(src.outputs))]
    names = [f"o{p}" for p in order]
    return _regroup(v, dom_blocks, cod_blocks, names, names)


# --- network files -------------------------------------------------------


def _backend_from_json(obj: dict):
    kind = obj.get("kind")
    if kind == "identity":
        return identity_supermap(wire(obj["input"]), wire(obj["output"]))
    if kind == "seqcomp":
        return seqcomp_supermap(wire(obj["a"]),
                                wire(obj.get("b", obj["a"])),
                                wire(obj.get("c", obj["a"])))
    if kind == "pair":
        return pair_supermap(wire(obj["a"]))
    if kind == "switch":
        from .switch import build_switch, standard_control

        return build_switch(standard_control(obj.get("control_dim", 2)),
                            wire(obj["a"])).backend
    if kind == "comb":
        from .comb import comb_from_json

        return comb_to_internal(comb_from_json(obj["comb"]))
    if kind == "discard":
        from .supermap import discard_reprepare_supermap
        from .tensor import identity as _id

        a = wire(obj["a"])
        v = morphism_from_json(obj["v"]) if "v" in obj else _id(a)
        return discard_reprepare_supermap(a, v)
    if kind == "internal":
        slots = tuple(
            HigherObject(wire(s["input"]), wire(s["output"])) for s in obj["slots"]
        )
        outer = HigherObject(wire(obj["outer"]["input"]), wire(obj["outer"]["output"]))
        return InternalSupermap(slots, outer, morphism_from_json(obj["internal"]))
    raise TypeMismatch(f"unknown backend kind {kind!r}")


def network_from_json(obj: dict) -> tuple[dict[str, PolyTerm], Morphism | None]:
    """Build terms, apply the listed compositions, optionally evaluate one term.

    Composition entries reference term ids; each entry replaces its two
    operands by the composite, stored under entry["id"] (default
    "to∘from").  Returns the final live terms and the evaluation result.
    """
    live: dict[str, PolyTerm] = {}
    for tdef in obj.get("terms", []):
        backend = _backend_from_json(tdef["backend"])
        split = None
        if "output_split" in tdef:
            split = [HigherObject(wire(a), wire(b)) for a, b in tdef["output_split"]]
        live[tdef["id"]] = term_from_internal(backend, split_outputs=split,
                                              name=tdef["id"]) \
            if isinstance(backend, InternalSupermap) \
            else make_term(backend.slots, split or (backend.outer,), backend,
                           name=tdef["id"])
    for comp in obj.get("compositions", []):
        t = live.pop(comp["to"])
        s = live[comp["from"]] if comp["from"] != comp["to"] else t
        if comp["from"] in live:
            del live[comp["from"]]
        new = compose_along(t, s, comp.get("in_leg", 0), comp.get("out_leg", 0))
        live[comp.get("id", f"{comp['to']}∘{comp['from']}")] = new
    result = None
    ev = obj.get("evaluate")
    if ev:
        term = live[ev["term"]]
        args = []
        for a in ev["args"]:
            if "morphism" in a:
                args.append((morphism_from_json(a["morphism"]),
                             wire(a.get("ext_in", [])), wire(a.get("ext_out", []))))
            else:
                args.append(morphism_from_json(a))
        result = evaluate(term, args)
    return live, result

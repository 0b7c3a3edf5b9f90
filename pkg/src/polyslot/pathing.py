"""No-pathing constraints on unitaries: decision, witnesses, loop contraction.

A constraint names a block of input factors (the forbidden source) and a
block of output factors (the forbidden target).  A unitary satisfies the
constraint when no directed path leads from the source block to the target
block, equivalently when it factors as a staircase
phi = (id_T (x) g) o (f (x) id_S) with f: A -> T (x) M and g: M (x) S -> R,
where A/S partition the inputs and T/R the outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categories import CategoryTag, is_unitary
from .errors import (
    ConstraintFails,
    DimensionMismatch,
    ExtractionUnstable,
    NotClosed,
    NotUnitary,
    PathViolation,
)
from .tensor import (
    DEFAULT_TOL,
    Morphism,
    Tolerance,
    WireType,
    compose,
    contract_wire,
    identity,
    max_entry_diff,
    permute_factors,
    tensor,
    wire,
)

__all__ = [
    "PathConstraint",
    "PathWitness",
    "check_no_path_unitary",
    "extract_witness",
    "reassemble",
    "contract_path",
    "groupoid_sandwich_invariance",
]


@dataclass(frozen=True)
class PathConstraint:
    """Forbid directed paths from the given input factors to the given output factors."""

    from_inputs: tuple[int, ...]
    to_outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "from_inputs", tuple(int(i) for i in self.from_inputs))
        object.__setattr__(self, "to_outputs", tuple(int(i) for i in self.to_outputs))
        if len(set(self.from_inputs)) != len(self.from_inputs):
            raise ValueError("duplicate input factor in constraint")
        if len(set(self.to_outputs)) != len(self.to_outputs):
            raise ValueError("duplicate output factor in constraint")

    def blocks(self, phi: Morphism):
        """Return (keep_in, src_in, tgt_out, keep_out) factor index tuples."""
        n_in, n_out = len(phi.dom), len(phi.cod)
        src = self.from_inputs
        tgt = self.to_outputs
        if any(i >= n_in for i in src) or any(o >= n_out for o in tgt):
            raise DimensionMismatch("constraint indexes factors outside the morphism")
        keep_in = tuple(i for i in range(n_in) if i not in src)
        keep_out = tuple(o for o in range(n_out) if o not in tgt)
        return keep_in, src, tgt, keep_out


@dataclass(frozen=True)
class PathWitness:
    """Staircase witness in canonical block order (inputs A ++ S, outputs T ++ R)."""

    first: Morphism  # f: A -> T (x) M
    second: Morphism  # g: M (x) S -> R
    memory: WireType


def _canonicalize(phi: Morphism, c: PathConstraint) -> tuple[Morphism, tuple, tuple]:
    keep_in, src, tgt, keep_out = c.blocks(phi)
    in_perm = keep_in + src
    out_perm = tgt + keep_out
    canon = permute_factors(phi, in_perm, out_perm)
    return canon, (keep_in, src), (tgt, keep_out)


def _block_dims(phi: Morphism, c: PathConstraint) -> tuple[int, int, int, int]:
    keep_in, src, tgt, keep_out = c.blocks(phi)
    d = lambda idx, factors: int(np.prod([factors[i] for i in idx])) if idx else 1
    return (
        d(keep_in, phi.dom.factors),
        d(src, phi.dom.factors),
        d(tgt, phi.cod.factors),
        d(keep_out, phi.cod.factors),
    )


def _semicausal_gap(phi: Morphism, c: PathConstraint) -> float:
    """Max-entry defect of the complete linear no-signalling test."""
    canon, _, _ = _canonicalize(phi, c)
    da, ds, dt, dr = _block_dims(phi, c)
    u = canon.mat.reshape(dt, dr, da, ds)
    # Choi of the channel (A (x) S) -> T obtained by tracing the R output.
    j = np.einsum("trax,urby->axtbyu", u, u.conj())
    # Marginal on a maximally mixed source input.
    j_marg = np.einsum("axtbxu->atbu", j) / ds
    expected = np.einsum("atbu,xy->axtbyu", j_marg, np.eye(ds))
    return float(np.max(np.abs(j - expected)))


def check_no_path_unitary(
    phi: Morphism, c: PathConstraint, tol: Tolerance = DEFAULT_TOL
) -> bool:
    """Decide absence of signalling from the source inputs to the target outputs."""
    if not is_unitary(phi, Tolerance(max(tol.abs_tol, 1e-8))):
        raise NotUnitary("no-pathing test is defined for unitaries")
    dim = phi.dom.total
    return _semicausal_gap(phi, c) <= tol.abs_tol * dim


def extract_witness(
    phi: Morphism, c: PathConstraint, tol: Tolerance = DEFAULT_TOL
) -> PathWitness:
    """Recover a staircase witness for a unitary satisfying the constraint.

    The first factor is read off the Kraus decomposition of the marginal
    channel A -> T; the second is solved for by contracting the unitary
    against the conjugated first factor.  Witnesses are unique only up to a
    unitary on the memory wire, so callers should compare reassembled
    composites rather than witnesses.
    """
    if not check_no_path_unitary(phi, c, tol):
        raise ConstraintFails("morphism does not satisfy the no-pathing constraint")
    canon, (keep_in, src), (tgt, keep_out) = _canonicalize(phi, c)
    da, ds, dt, dr = _block_dims(phi, c)
    a_w = wire([phi.dom.factors[i] for i in keep_in])
    s_w = wire([phi.dom.factors[i] for i in src])
    t_w = wire([phi.cod.factors[i] for i in tgt])
    r_w = wire([phi.cod.factors[i] for i in keep_out])

    u = canon.mat.reshape(dt, dr, da, ds)
    # Choi of the marginal channel A -> T at a maximally mixed source input.
    j = np.einsum("trax,urbx->atbu", u, u.conj()) / ds
    j = j.reshape(da * dt, da * dt)
    vals, vecs = np.linalg.eigh(0.5 * (j + j.conj().T))
    cutoff = max(tol.abs_tol, 1e-12) * j.shape[0]
    order = [i for i in range(len(vals) - 1, -1, -1) if vals[i] > cutoff]
    rank = len(order)
    mem = wire([rank]) if rank != 1 else wire([1])
    lam = np.array([vals[i] for i in order])
    kraus = np.stack(
        [np.sqrt(vals[i]) * vecs[:, i].reshape(da, dt).T for i in order]
    )  # kraus[m, t, a]

    f_mat = np.transpose(kraus, (1, 0, 2)).reshape(dt * rank, da)  # rows (t, m)
    first = Morphism(a_w, t_w + mem, f_mat)

    # g[r, (m, s)] = (1/lam_m) sum_{t,a} conj(K_m[t, a]) U[(t, r), (a, s)]
    g = np.einsum("mta,tras->rms", kraus.conj(), u) / lam[None, :, None]
    second = Morphism(mem + s_w, r_w, g.reshape(dr, rank * ds))

    residual = max_entry_diff(reassemble(first, second, t_w, s_w), canon)
    if residual > max(tol.abs_tol, 1e-8):
        raise ExtractionUnstable(residual)
    return PathWitness(first, second, mem)


def reassemble(first: Morphism, second: Morphism, t_w, s_w) -> Morphism:
    """(id_T (x) g) o (f (x) id_S) in canonical block order."""
    t_w, s_w = wire(t_w), wire(s_w)
    return compose(tensor(identity(t_w), second), tensor(first, identity(s_w)))


def contract_path(
    phi: Morphism,
    loop_out: int,
    loop_in: int,
    c: PathConstraint,
    tol: Tolerance = DEFAULT_TOL,
    cat: CategoryTag = CategoryTag.FU,
) -> Morphism:
    """Close an output wire onto an input wire, guarded by the no-pathing test."""
    if loop_in not in c.from_inputs or loop_out not in c.to_outputs:
        raise PathViolation("constraint does not cover the requested loop wires")
    if not check_no_path_unitary(phi, c, tol):
        raise PathViolation("contraction would create a time-loop")
    out = contract_wire(phi, loop_out, loop_in)
    if cat is CategoryTag.FU and not is_unitary(out, Tolerance(max(tol.abs_tol, 1e-8))):
        raise NotClosed("contracted morphism left the unitary groupoid")
    return out


def _embed_square(op: Morphism, env: WireType, positions: tuple[int, ...]) -> Morphism:
    """op acting on the listed factor positions of env, identity elsewhere."""
    rest = tuple(i for i in range(len(env)) if i not in positions)
    big = tensor(op, identity(wire([env.factors[i] for i in rest])))
    # big's factor order is positions ++ rest; permute back to env order.
    order = list(positions) + list(rest)
    inv = [order.index(i) for i in range(len(env))]
    return permute_factors(big, inv, inv)


def groupoid_sandwich_invariance(
    phi: Morphism,
    v: Morphism,
    w: Morphism,
    c: PathConstraint,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """The no-pathing verdict is invariant under unitary dressing of the free wires."""
    keep_in, src, tgt, keep_out = c.blocks(phi)
    pre = _embed_square(v, phi.dom, src)
    post = _embed_square(w, phi.cod, keep_out)
    dressed = compose(post, compose(phi, pre))
    return check_no_path_unitary(phi, c, tol) == check_no_path_unitary(dressed, c, tol)

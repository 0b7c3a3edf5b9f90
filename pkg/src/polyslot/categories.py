"""Membership tests and samplers for the concrete categories fHilb, fU and fQC.

Unitaries and plain linear maps are stored as Morphism matrices; quantum
channels are stored as Choi matrices with the input block first:
J = sum_ij |i><j| (x) Phi(|i><j|).  Conversion between the two pictures is
always explicit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import TypeMismatch
from .tensor import (
    DEFAULT_TOL,
    Morphism,
    Tolerance,
    WireType,
    wire,
)

__all__ = [
    "CategoryTag",
    "ChoiMatrix",
    "is_unitary",
    "unitarity_defect",
    "choi_of_kraus",
    "choi_of_unitary",
    "kraus_of_choi",
    "is_cptp",
    "cptp_defect",
    "apply_channel",
    "haar_unitary",
    "random_cptp_kraus",
    "choi_to_json",
    "choi_from_json",
]


class CategoryTag(enum.Enum):
    FHILB = "fhilb"
    FU = "fu"
    FQC = "fqc"


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi operator of a map L(in_w) -> L(out_w), input block first."""

    in_w: WireType
    out_w: WireType
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=np.complex128)
        object.__setattr__(self, "mat", mat)
        d = self.in_w.total * self.out_w.total
        if mat.shape != (d, d):
            raise TypeMismatch(f"Choi shape {mat.shape} does not match dimension {d}")


def unitarity_defect(f: Morphism) -> float:
    """Max-entry deviation of U†U and UU† from the identities."""
    left = f.mat.conj().T @ f.mat
    right = f.mat @ f.mat.conj().T
    dl = np.max(np.abs(left - np.eye(f.dom.total)))
    dr = np.max(np.abs(right - np.eye(f.cod.total)))
    return float(max(dl, dr))


def is_unitary(f: Morphism, tol: Tolerance = DEFAULT_TOL) -> bool:
    if f.dom.total != f.cod.total:
        return False
    return unitarity_defect(f) <= tol.abs_tol


def choi_of_kraus(kraus: Sequence[Morphism]) -> ChoiMatrix:
    """J = sum_ij |i><j| (x) sum_k K |i><j| K† under the big-endian convention."""
    if not kraus:
        raise TypeMismatch("need at least one Kraus operator")
    dom = kraus[0].dom
    cod = kraus[0].cod
    for k in kraus[1:]:
        if k.dom.factors != dom.factors or k.cod.factors != cod.factors:
            raise TypeMismatch("Kraus operators must share dom and cod")
    d_in, d_out = dom.total, cod.total
    j = np.zeros((d_in * d_out, d_in * d_out), dtype=np.complex128)
    for k in kraus:
        # vec with input index most significant: v[(i, o)] = K[o, i]
        v = k.mat.T.reshape(-1, 1)
        j += v @ v.conj().T
    return ChoiMatrix(dom, cod, j)


def choi_of_unitary(u: Morphism) -> ChoiMatrix:
    return choi_of_kraus([u])


def kraus_of_choi(j: ChoiMatrix, tol: Tolerance = DEFAULT_TOL) -> list[Morphism]:
    """Kraus operators from the eigendecomposition, eigenvalue cutoff dim*tol."""
    d_in, d_out = j.in_w.total, j.out_w.total
    herm = 0.5 * (j.mat + j.mat.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    cutoff = max(tol.abs_tol, 1e-12) * herm.shape[0]
    ops = []
    for idx in range(len(vals) - 1, -1, -1):  # descending eigenvalues
        lam = vals[idx]
        if lam <= cutoff:
            continue
        v = np.sqrt(lam) * vecs[:, idx]
        ops.append(Morphism(j.in_w, j.out_w, v.reshape(d_in, d_out).T))
    if not ops:
        ops.append(Morphism(j.in_w, j.out_w, np.zeros((d_out, d_in))))
    return ops


def cptp_defect(j: ChoiMatrix) -> tuple[float, float]:
    """(CP defect, TP defect): negative-eigenvalue mass and partial-trace error."""
    herm_err = float(np.max(np.abs(j.mat - j.mat.conj().T)))
    herm = 0.5 * (j.mat + j.mat.conj().T)
    vals = np.linalg.eigvalsh(herm)
    cp = max(0.0, float(-vals.min()), herm_err)
    d_in, d_out = j.in_w.total, j.out_w.total
    t = j.mat.reshape(d_in, d_out, d_in, d_out)
    marg = np.trace(t, axis1=1, axis2=3)
    tp = float(np.max(np.abs(marg - np.eye(d_in))))
    return cp, tp


def is_cptp(j: ChoiMatrix, tol: Tolerance = DEFAULT_TOL) -> bool:
    cp, tp = cptp_defect(j)
    dim = j.mat.shape[0]
    return cp <= tol.abs_tol * dim and tp <= tol.abs_tol * dim


def apply_channel(j: ChoiMatrix, rho: Morphism) -> Morphism:
    """Phi(rho) = Tr_in[(rho^T (x) I) J], consistent with choi_of_kraus."""
    if rho.dom.factors != j.in_w.factors or rho.cod.factors != j.in_w.factors:
        raise TypeMismatch("rho must be an operator on the channel input space")
    d_in, d_out = j.in_w.total, j.out_w.total
    t = j.mat.reshape(d_in, d_out, d_in, d_out)
    out = np.einsum("ij,iajb->ab", rho.mat, t)
    return Morphism(j.out_w, j.out_w, out)


def haar_unitary(w, rng: "np.random.Generator | int") -> Morphism:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    w = wire(w)
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n = w.total
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return Morphism(w, w, q * ph)


def haar_isometry(dom, cod, rng) -> Morphism:
    """Haar-random isometry: the first dom columns of a Haar unitary on cod."""
    dom, cod = wire(dom), wire(cod)
    if dom.total > cod.total:
        raise TypeMismatch("isometry needs dom dimension <= cod dimension")
    u = haar_unitary(cod, rng)
    return Morphism(dom, cod, u.mat[:, : dom.total])


def random_cptp_kraus(dom, cod, rng, env_dim: int | None = None) -> list[Morphism]:
    """Random CPTP channel via a Haar Stinespring isometry, returned as Kraus list."""
    dom, cod = wire(dom), wire(cod)
    env = env_dim if env_dim is not None else dom.total
    v = haar_isometry(dom, wire((cod.total, env)), rng)
    t = v.mat.reshape(cod.total, env, dom.total)
    return [Morphism(dom, cod, t[:, k, :]) for k in range(env)]


def choi_to_json(j: ChoiMatrix) -> dict:
    return {
        "kind": "choi",
        "in": list(j.in_w.factors),
        "out": list(j.out_w.factors),
        "re": j.mat.real.reshape(-1).tolist(),
        "im": j.mat.imag.reshape(-1).tolist(),
    }


def choi_from_json(obj: dict) -> ChoiMatrix:
    if obj.get("kind") != "choi":
        raise TypeMismatch("expected a Choi-matrix JSON object")
    in_w, out_w = wire(obj["in"]), wire(obj["out"])
    d = in_w.total * out_w.total
    mat = (np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])).reshape(d, d)
    return ChoiMatrix(in_w, out_w, mat)

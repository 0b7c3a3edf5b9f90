"""Deterministic fixture corpus: reference morphisms, supermaps, and networks.

Every artifact is regenerated from a fixed seed; a manifest records SHA-256
digests so drift in serialization or numerics is caught immediately.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .categories import haar_unitary
from .comb import comb_to_json, random_unitary_comb
from .errors import DigestMismatch
from .pathing import reassemble
from .tensor import Morphism, morphism_to_json, wire

__all__ = ["regen_fixtures", "check_fixtures", "fixture_path", "DEFAULT_SEED"]

DEFAULT_SEED = 20240

MANIFEST_NAME = "manifest.json"


def fixture_path(root=None) -> Path:
    if root is not None:
        return Path(root)
    return Path(__file__).resolve().parents[2] / "fixtures"


def _swap() -> Morphism:
    a = wire([2])
    m = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            m[j * 2 + i, i * 2 + j] = 1.0
    return Morphism(a + a, a + a, m)


def _cnot() -> Morphism:
    a = wire([2, 2])
    m = np.eye(4)[:, [0, 1, 3, 2]]
    return Morphism(a, a, m)


def _hadamard() -> Morphism:
    a = wire([2])
    return Morphism(a, a, np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def _staircase(rng) -> Morphism:
    """Unitary on [2, 2, 2] with no path from input 2 to output 0.

    Canonical blocks: A = inputs {0, 1}, S = input {2}, T = output {0},
    R = outputs {1, 2}, memory M = [2].
    """
    first = haar_unitary([2, 2], rng)   # A -> T (x) M
    second = haar_unitary([2, 2], rng)  # M (x) S -> R
    return reassemble(first, second, wire([2]), wire([2]))


def _definitions(seed: int) -> dict[str, dict]:
    rng = np.random.default_rng(seed)
    staircase = _staircase(rng)
    comb = random_unitary_comb([2], [2], rng)
    haar_pair = [haar_unitary([2], rng) for _ in range(2)]
    return {
        "swap.json": {
            "description": "swap of two qubit wires",
            "morphism": morphism_to_json(_swap()),
        },
        "cnot.json": {
            "description": "controlled-NOT on [2, 2]; signals control to target",
            "morphism": morphism_to_json(_cnot()),
        },
        "hadamard.json": {
            "description": "Hadamard gate on a single qubit",
            "morphism": morphism_to_json(_hadamard()),
        },
        "staircase.json": {
            "description": "Haar staircase unitary on [2, 2, 2] with no "
                           "path from input 2 to output 0",
            "morphism": morphism_to_json(staircase),
        },
        "haar_pair.json": {
            "description": "two seeded Haar qubit unitaries for switch demos",
            "morphisms": [morphism_to_json(u) for u in haar_pair],
        },
        "unitary_comb.json": {
            "description": "seeded random unitary comb with qubit slot and "
                           "qubit memory",
            "comb": comb_to_json(comb),
        },
        "switch_backend.json": {
            "description": "two-party qubit switch backend",
            "backend": {"kind": "switch", "a": [2], "control_dim": 2},
        },
        "discard_pseudo.json": {
            "description": "discard-and-reprepare pseudo-supermap; fails "
                           "category preservation on nontrivial extensions",
            "backend": {"kind": "discard", "a": [2],
                        "v": morphism_to_json(_hadamard())},
        },
        "loop_network.json": {
            "description": "sequential-composition term closed once onto a "
                           "cup pair; closing the remaining legs is rejected",
            "network": {
                "terms": [
                    {"id": "seq", "backend": {"kind": "seqcomp", "a": [2]}},
                    {"id": "pair", "backend": {"kind": "pair", "a": [2]},
                     "output_split": [[[2], [2]], [[2], [2]]]},
                ],
                "compositions": [
                    {"from": "pair", "to": "seq", "in_leg": 0, "out_leg": 0,
                     "id": "once"},
                ],
            },
        },
    }


def _dump(obj: dict) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2) + "\n").encode()


def regen_fixtures(seed: int = DEFAULT_SEED, root=None) -> dict[str, str]:
    """Write the fixture corpus and manifest; returns name -> digest."""
    out = fixture_path(root)
    out.mkdir(parents=True, exist_ok=True)
    digests = {}
    for name, obj in _definitions(seed).items():
        data = _dump(obj)
        (out / name).write_bytes(data)
        digests[name] = hashlib.sha256(data).hexdigest()
    manifest = {"seed": seed, "digests": digests}
    (out / MANIFEST_NAME).write_bytes(_dump(manifest))
    return digests


def check_fixtures(root=None) -> dict[str, str]:
    """Verify every fixture against the manifest; raises DigestMismatch."""
    out = fixture_path(root)
    manifest = json.loads((out / MANIFEST_NAME).read_text())
    seen = {}
    for name, want in manifest["digests"].items():
        path = out / name
        if not path.exists():
            raise DigestMismatch(f"missing fixture {name}")
        got = hashlib.sha256(path.read_bytes()).hexdigest()
        if got != want:
            raise DigestMismatch(f"{name}: digest {got} != manifest {want}")
        seen[name] = got
    regen = _definitions(manifest["seed"])
    for name in regen:
        if name not in manifest["digests"]:
            raise DigestMismatch(f"{name} absent from manifest")
        if hashlib.sha256(_dump(regen[name])).hexdigest() != manifest["digests"][name]:
            raise DigestMismatch(f"{name}: regeneration does not match manifest")
    return seen

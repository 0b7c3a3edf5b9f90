import json

import pytest

from polyslot import PathConstraint, check_no_path_unitary, morphism_from_json
from polyslot.categories import unitarity_defect
from polyslot.errors import DigestMismatch
from polyslot.fixtures import check_fixtures, fixture_path, regen_fixtures


def test_committed_fixtures_match_manifest():
    digests = check_fixtures()
    assert len(digests) >= 9


def test_regen_is_deterministic(tmp_path):
    d1 = regen_fixtures(root=tmp_path / "a")
    d2 = regen_fixtures(root=tmp_path / "b")
    assert d1 == d2
    assert d1 == check_fixtures(root=tmp_path / "a")


def test_tampering_detected(tmp_path):
    regen_fixtures(root=tmp_path)
    target = tmp_path / "swap.json"
    obj = json.loads(target.read_text())
    obj["morphism"]["re"][0] = 0.5
    target.write_text(json.dumps(obj))
    with pytest.raises(DigestMismatch):
        check_fixtures(root=tmp_path)


def test_missing_fixture_detected(tmp_path):
    regen_fixtures(root=tmp_path)
    (tmp_path / "cnot.json").unlink()
    with pytest.raises(DigestMismatch):
        check_fixtures(root=tmp_path)


def test_staircase_fixture_semantics():
    obj = json.loads((fixture_path() / "staircase.json").read_text())
    phi = morphism_from_json(obj["morphism"])
    assert unitarity_defect(phi) <= 1e-10
    assert check_no_path_unitary(phi, PathConstraint((2,), (0,)))


def test_cnot_fixture_signals():
    obj = json.loads((fixture_path() / "cnot.json").read_text())
    phi = morphism_from_json(obj["morphism"])
    assert not check_no_path_unitary(phi, PathConstraint((0,), (1,)))

"""Project persistence: round-trip fidelity, corruption and version checks."""

import json
import random
from fractions import Fraction

import pytest

from posteval.errors import CorruptFile, VersionMismatch
from posteval.model import ScoringConfig
from posteval.store import (
    PROJECT_FORMAT,
    PROJECT_VERSION,
    load_project,
    save_project,
)

from oracles import random_project


def test_round_trip_preserves_everything(tmp_path):
    rng = random.Random(123)
    for i in range(10):
        p = random_project(rng, name=f"proj-{i}")
        path = tmp_path / f"p{i}.json"
        save_project(p, path)
        q = load_project(path)
        assert q.name == p.name
        assert q.segments == p.segments
        assert q.outputs == p.outputs
        assert q.annotators == p.annotators
        assert q.annotations == p.annotations
        assert q.config == p.config
        assert isinstance(q.config.adp_weight, Fraction)


def test_config_fractions_survive_exactly(tmp_path):
    p = random_project(random.Random(5))
    p.config = ScoringConfig(adp_weight=Fraction(1, 3), minor_upper=Fraction(7, 4))
    path = tmp_path / "p.json"
    save_project(p, path)
    q = load_project(path)
    assert q.config.adp_weight == Fraction(1, 3)
    assert q.config.minor_upper == Fraction(7, 4)


def test_document_envelope_shape(tmp_path):
    p = random_project(random.Random(1))
    path = tmp_path / "p.json"
    save_project(p, path)
    doc = json.loads(path.read_text("utf-8"))
    assert doc["format"] == PROJECT_FORMAT
    assert doc["version"] == PROJECT_VERSION
    assert set(doc) == {"format", "version", "checksum", "payload"}


def test_checksum_detects_payload_tampering(tmp_path):
    p = random_project(random.Random(2))
    path = tmp_path / "p.json"
    save_project(p, path)
    doc = json.loads(path.read_text("utf-8"))
    doc["payload"]["name"] = "tampered"
    path.write_text(json.dumps(doc), "utf-8")
    with pytest.raises(CorruptFile, match="checksum"):
        load_project(path)


def test_load_rejects_garbage_and_wrong_format(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json", "utf-8")
    with pytest.raises(CorruptFile):
        load_project(path)
    path.write_text(json.dumps({"format": "other", "version": 1}), "utf-8")
    with pytest.raises(CorruptFile):
        load_project(path)
    path.write_text(json.dumps([1, 2, 3]), "utf-8")
    with pytest.raises(CorruptFile):
        load_project(path)


def test_load_rejects_future_version(tmp_path):
    p = random_project(random.Random(3))
    path = tmp_path / "p.json"
    save_project(p, path)
    doc = json.loads(path.read_text("utf-8"))
    doc["version"] = PROJECT_VERSION + 1
    path.write_text(json.dumps(doc), "utf-8")
    with pytest.raises(VersionMismatch):
        load_project(path)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_project(tmp_path / "absent.json")


def test_save_is_atomic_no_partial_file_on_failure(tmp_path):
    """A failed save must not clobber the existing good file."""
    p = random_project(random.Random(4))
    path = tmp_path / "p.json"
    save_project(p, path)
    before = path.read_bytes()

    bad = random_project(random.Random(5))
    bad.config = "not a config"  # forces serialization failure
    with pytest.raises(Exception):
        save_project(bad, path)
    assert path.read_bytes() == before
    leftovers = [f for f in tmp_path.iterdir() if f.name != "p.json"]
    assert leftovers == []


def test_save_creates_parent_directories(tmp_path):
    p = random_project(random.Random(6))
    path = tmp_path / "a" / "b" / "p.json"
    save_project(p, path)
    assert load_project(path).name == p.name


def test_revision_history_survives_round_trip(tmp_path):
    from posteval.model import Annotation, ErrorCategory, Severity

    p = random_project(random.Random(7), n_segments=2, n_systems=1, n_annotators=1)
    seg = p.segments[0].id
    system_id = p.system_ids()[0]
    p.add_annotation(Annotation(
        annotator_id="ann0", segment_id=seg, system_id=system_id,
        severities={ErrorCategory.FLU: Severity.MAJOR}, revision=2))
    path = tmp_path / "p.json"
    save_project(p, path)
    q = load_project(path)
    from posteval.model import authoritative_annotations
    assert authoritative_annotations(q)[("ann0", seg, system_id)].revision == 2
    assert len(q.annotations) == len(p.annotations)

"""Versioned project persistence with content checksums.

A project file is a JSON document: format tag, integer version, sha256
checksum of the canonical payload encoding, and the payload itself (full
state including the append-only annotation log and the taxonomy tree).
Writes go through a temp file plus atomic rename, so an interrupted save
leaves the previous intact file in place; loads verify the checksum.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path

from .errors import CorruptFile, VersionMismatch
from .model import (
    AggregationMode,
    Annotation,
    ErrorCategory,
    Project,
    ScoringConfig,
    Segment,
    Severity,
    SystemOutput,
)
from .protocol import DecisionTree, tree_from_dict, tree_to_dict

PROJECT_FORMAT = "posteval-project"
PROJECT_VERSION = 1


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def config_to_dict(cfg: ScoringConfig) -> dict:
    return {
        "adp_weight": str(cfg.adp_weight),
        "minor_upper": str(cfg.minor_upper),
        "min_project_size": cfg.min_project_size,
        "annotator_aggregation": cfg.annotator_aggregation.value,
        "aggregation_annotator": cfg.aggregation_annotator,
    }


def config_from_dict(data: dict) -> ScoringConfig:
    return ScoringConfig(
        adp_weight=Fraction(data["adp_weight"]),
        minor_upper=Fraction(data["minor_upper"]),
        min_project_size=int(data["min_project_size"]),
        annotator_aggregation=AggregationMode(data["annotator_aggregation"]),
        aggregation_annotator=data.get("aggregation_annotator"),
    )


def annotation_to_dict(a: Annotation) -> dict:
    return {
        "annotator": a.annotator_id,
        "segment": a.segment_id,
        "system": a.system_id,
        "severities": {cat.value: int(sev) for cat, sev in a.severities.items()},
        "adp_applicable": a.adp_applicable,
        "revision": a.revision,
    }


def annotation_from_dict(data: dict) -> Annotation:
    return Annotation(
        annotator_id=data["annotator"],
        segment_id=data["segment"],
        system_id=data["system"],
        severities={ErrorCategory(c): Severity(v) for c, v in data["severities"].items()},
        adp_applicable=bool(data["adp_applicable"]),
        revision=int(data["revision"]),
    )


def project_to_dict(project: Project) -> dict:
    taxonomy = project.taxonomy
    return {
        "name": project.name,
        "config": config_to_dict(project.config),
        "segments": [
            {"id": s.id, "source_da": s.source_da, "gold_msa": s.gold_msa}
            for s in project.segments
        ],
        "outputs": [
            {"segment": o.segment_id, "system": o.system_id, "hypothesis": o.hypothesis}
            for o in project.outputs
        ],
        "annotators": list(project.annotators),
        "taxonomy": tree_to_dict(taxonomy) if isinstance(taxonomy, DecisionTree) else None,
        "annotations": [annotation_to_dict(a) for a in project.annotations],
    }


def project_from_dict(payload: dict) -> Project:
    try:
        project = Project(
            name=payload["name"],
            config=config_from_dict(payload["config"]),
            segments=[Segment(s["id"], s["source_da"], s["gold_msa"]) for s in payload["segments"]],
            outputs=[SystemOutput(o["segment"], o["system"], o["hypothesis"])
                     for o in payload["outputs"]],
            annotators=list(payload["annotators"]),
            taxonomy=tree_from_dict(payload["taxonomy"]) if payload.get("taxonomy") else None,
        )
        for entry in payload["annotations"]:
            project.add_annotation(annotation_from_dict(entry))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFile(f"project payload is malformed: {exc}") from exc
    return project


def save_project(project: Project, path: str | Path) -> None:
    path = Path(path)
    payload = project_to_dict(project)
    doc = {
        "format": PROJECT_FORMAT,
        "version": PROJECT_VERSION,
        "checksum": hashlib.sha256(_canonical(payload)).hexdigest(),
        "payload": payload,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_project(path: str | Path) -> Project:
    # FileNotFoundError propagates as-is: "no such project" is not corruption.
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise CorruptFile(f"cannot read project file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFile(f"project file {path} is not valid JSON (truncated?): {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != PROJECT_FORMAT:
        raise CorruptFile(f"{path} is not a {PROJECT_FORMAT} file")
    version = doc.get("version")
    if not isinstance(version, int) or version > PROJECT_VERSION:
        raise VersionMismatch(
            f"project file version {version!r} is newer than supported {PROJECT_VERSION}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise CorruptFile(f"{path} has no payload")
    checksum = hashlib.sha256(_canonical(payload)).hexdigest()
    if checksum != doc.get("checksum"):
        raise CorruptFile(f"checksum mismatch in {path}: content was altered or truncated")
    return project_from_dict(payload)

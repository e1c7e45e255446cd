"""HTTP facade over projects: item assignment, guided annotation sessions,
direct submission, progress, and report retrieval.

Projects live as JSON files in a data directory; the project id is the file
stem. Writes to one project are serialized through a per-project lock and the
file is rewritten after every mutation, so a crash never leaves a half-applied
change (the store writes atomically). Reads work on the in-memory snapshot.

Annotation sessions are server-side: the client only ever sends the next
answer, and the full state can be re-fetched after a dropped connection.
"""

from __future__ import annotations

import re
import threading
import uuid
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .demo import demo_project
from .errors import (
    DuplicateProject,
    DuplicateRevision,
    GatingViolation,
    InvalidAnnotation,
    PostevalError,
    StaleRevision,
    UnknownAnnotator,
    UnknownProject,
    UnknownReference,
    UnknownSession,
    UnknownSystem,
)
from .model import (
    Annotation,
    ErrorCategory,
    Project,
    ScoringConfig,
    Segment,
    Severity,
    SystemOutput,
    authoritative_annotations,
    validate_annotation,
)
from .protocol import (
    DecisionTree,
    Node,
    ProtocolState,
    answer as protocol_answer,
    default_tree,
    finalize as protocol_finalize,
    start_session,
)
from .reports import REPORT_FORMATS, REPORT_KINDS, build_report, render
from .scoring import round_half_up
from .store import (
    annotation_to_dict,
    config_from_dict,
    config_to_dict,
    load_project,
    save_project,
)

PROJECT_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")

MEDIA_TYPES = {
    "text": "text/plain; charset=utf-8",
    "delimited": "text/tab-separated-values; charset=utf-8",
    "structured": "application/json",
}

# HTTP status per domain error; anything unlisted is a 422 (request was
# understood but conflicts with the rules).
_STATUS = {
    UnknownProject: 404,
    UnknownSession: 404,
    UnknownSystem: 404,
    UnknownAnnotator: 404,
    UnknownReference: 404,
    DuplicateProject: 409,
    DuplicateRevision: 409,
    StaleRevision: 409,
}


@dataclass
class _Session:
    """One in-flight decision-tree walk."""

    session_id: str
    project_id: str
    state: ProtocolState
    finalized: bool = False


class Registry:
    """Project files, in-memory snapshots, locks, and live sessions."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._sessions: dict[str, _Session] = {}
        self._mutex = threading.Lock()

    def path_for(self, project_id: str) -> Path:
        return self.data_dir / f"{project_id}.json"

    def lock(self, project_id: str) -> threading.Lock:
        with self._mutex:
            return self._locks.setdefault(project_id, threading.Lock())

    def project_ids(self) -> list[str]:
        ids = {p.stem for p in self.data_dir.glob("*.json")}
        return sorted(ids)

    def get(self, project_id: str) -> Project:
        with self._mutex:
            cached = self._projects.get(project_id)
        if cached is not None:
            return cached
        try:
            project = load_project(self.path_for(project_id))
        except FileNotFoundError:
            raise UnknownProject(f"no project named {project_id!r}")
        with self._mutex:
            return self._projects.setdefault(project_id, project)

    def put(self, project_id: str, project: Project) -> None:
        """Persist first, then swap the snapshot; callers hold the project lock."""
        save_project(project, self.path_for(project_id))
        with self._mutex:
            self._projects[project_id] = project

    def drop(self, project_id: str) -> None:
        path = self.path_for(project_id)
        if not path.exists():
            raise UnknownProject(f"no project named {project_id!r}")
        path.unlink()
        with self._mutex:
            self._projects.pop(project_id, None)
            self._sessions = {
                sid: s for sid, s in self._sessions.items() if s.project_id != project_id
            }

    # -- sessions -------------------------------------------------------------

    def add_session(self, session: _Session) -> None:
        with self._mutex:
            self._sessions[session.session_id] = session

    def session(self, session_id: str) -> _Session:
        with self._mutex:
            found = self._sessions.get(session_id)
        if found is None:
            raise UnknownSession(f"no session {session_id!r}")
        return found


# -- request bodies -----------------------------------------------------------

class ProjectCreate(BaseModel):
    name: str
    demo: bool = False
    config: dict | None = None


class AnnotatorAdd(BaseModel):
    annotator_id: str


class SessionStart(BaseModel):
    annotator_id: str
    segment_id: str
    system_id: str


class SessionAnswer(BaseModel):
    response: int | str


class AnnotationSubmit(BaseModel):
    annotator_id: str
    segment_id: str
    system_id: str
    severities: dict[str, int]
    adp_applicable: bool = True


# -- response helpers ---------------------------------------------------------

def _project_meta(project_id: str, project: Project) -> dict:
    return {
        "id": project_id,
        "name": project.name,
        "segments": len(project.segments),
        "systems": project.system_ids(),
        "annotators": list(project.annotators),
        "annotations": len(project.annotations),
        "config": config_to_dict(project.config),
    }


def _node_payload(node: Node | None) -> dict | None:
    if node is None:
        return None
    return {
        "node_id": node.node_id,
        "kind": node.kind.value,
        "question": node.question,
        "category": node.category.value if node.category else None,
    }


def _session_payload(session: _Session) -> dict:
    state = session.state
    return {
        "session_id": session.session_id,
        "annotator_id": state.annotator_id,
        "segment_id": state.segment_id,
        "system_id": state.system_id,
        "done": state.done,
        "finalized": session.finalized,
        "node": _node_payload(state.current_node()),
        "trail": [list(step) for step in state.trail],
    }


def _tree_for(project: Project) -> DecisionTree:
    return project.taxonomy if isinstance(project.taxonomy, DecisionTree) else default_tree()


def _item_pairs(project: Project) -> list[tuple[str, str]]:
    """All annotatable (segment, system) pairs: systems outer, segments inner."""
    index = {(o.segment_id, o.system_id) for o in project.outputs}
    return [
        (seg.id, sys_id)
        for sys_id in project.system_ids()
        for seg in project.segments
        if (seg.id, sys_id) in index
    ]


def create_app(data_dir: str | Path) -> FastAPI:
    registry = Registry(data_dir)
    app = FastAPI(title="posteval", docs_url=None, redoc_url=None)
    app.state.registry = registry

    # The annotation UI is served from a different origin during development.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(PostevalError)
    async def _domain_error(request: Request, exc: PostevalError):
        return JSONResponse(status_code=_STATUS.get(type(exc), 422), content=exc.payload())

    # -- projects -------------------------------------------------------------

    @app.get("/projects")
    def list_projects() -> dict:
        return {
            "projects": [_project_meta(pid, registry.get(pid)) for pid in registry.project_ids()]
        }

    @app.post("/projects", status_code=201)
    def create_project(body: ProjectCreate) -> dict:
        pid = body.name
        if not PROJECT_ID_RE.fullmatch(pid):
            raise InvalidAnnotation(
                f"project name {pid!r} must match {PROJECT_ID_RE.pattern}"
            )
        with registry.lock(pid):
            if registry.path_for(pid).exists():
                raise DuplicateProject(f"project {pid!r} already exists")
            if body.demo:
                project = demo_project()
                project.name = pid
            else:
                project = Project(name=pid)
            if body.config is not None:
                merged = config_to_dict(ScoringConfig())
                merged.update(body.config)
                project.config = config_from_dict(merged)
            registry.put(pid, project)
        return _project_meta(pid, project)

    @app.get("/projects/{pid}")
    def get_project(pid: str) -> dict:
        return _project_meta(pid, registry.get(pid))

    @app.delete("/projects/{pid}", status_code=204)
    def delete_project(pid: str) -> None:
        with registry.lock(pid):
            registry.drop(pid)

    @app.get("/projects/{pid}/segments")
    def list_segments(pid: str) -> dict:
        project = registry.get(pid)
        return {
            "segments": [
                {"id": s.id, "source_da": s.source_da, "gold_msa": s.gold_msa}
                for s in project.segments
            ]
        }

    @app.post("/projects/{pid}/annotators")
    def add_annotator(pid: str, body: AnnotatorAdd) -> dict:
        with registry.lock(pid):
            project = registry.get(pid)
            if body.annotator_id not in project.annotators:
                project.annotators.append(body.annotator_id)
                registry.put(pid, project)
        return {"annotators": list(project.annotators)}

    # -- assignment -----------------------------------------------------------

    @app.get("/projects/{pid}/next-item")
    def next_item(pid: str, annotator_id: str) -> dict:
        project = registry.get(pid)
        if annotator_id not in project.annotators:
            raise UnknownAnnotator(f"annotator {annotator_id!r} is not registered")
        done_keys = authoritative_annotations(project)
        open_pairs = [
            (seg_id, sys_id)
            for seg_id, sys_id in _item_pairs(project)
            if (annotator_id, seg_id, sys_id) not in done_keys
        ]
        if not open_pairs:
            return {"done": True}
        seg_id, sys_id = open_pairs[0]
        segment = project.segment_by_id(seg_id)
        output = project.output_for(seg_id, sys_id)
        return {
            "done": False,
            "segment_id": seg_id,
            "system_id": sys_id,
            "source_da": segment.source_da,
            "gold_msa": segment.gold_msa,
            "hypothesis": output.hypothesis,
            "remaining": len(open_pairs),
        }

    # -- guided sessions ------------------------------------------------------

    @app.post("/projects/{pid}/session/start", status_code=201)
    def session_start(pid: str, body: SessionStart) -> dict:
        project = registry.get(pid)
        if body.annotator_id not in project.annotators:
            raise UnknownAnnotator(f"annotator {body.annotator_id!r} is not registered")
        segment = project.segment_by_id(body.segment_id)
        if segment is None:
            raise UnknownReference(f"segment {body.segment_id!r} does not exist")
        if body.system_id not in project.system_ids():
            raise UnknownSystem(f"system {body.system_id!r} has no outputs in this project")
        output = project.output_for(body.segment_id, body.system_id)
        if output is None:
            raise UnknownReference(
                f"no output for segment {body.segment_id!r} by system {body.system_id!r}"
            )
        state = start_session(_tree_for(project), segment, output, body.annotator_id)
        session = _Session(uuid.uuid4().hex, pid, state)
        registry.add_session(session)
        return _session_payload(session)

    @app.get("/projects/{pid}/session/{sid}")
    def session_state(pid: str, sid: str) -> dict:
        session = registry.session(sid)
        if session.project_id != pid:
            raise UnknownSession(f"no session {sid!r}")
        return _session_payload(session)

    @app.post("/projects/{pid}/session/{sid}/answer")
    def session_answer(pid: str, sid: str, body: SessionAnswer) -> dict:
        session = registry.session(sid)
        if session.project_id != pid:
            raise UnknownSession(f"no session {sid!r}")
        if session.finalized:
            raise StaleRevision("session was already finalized")
        session.state = protocol_answer(session.state, body.response)
        return _session_payload(session)

    @app.post("/projects/{pid}/session/{sid}/finalize", status_code=201)
    def session_finalize(pid: str, sid: str) -> dict:
        session = registry.session(sid)
        if session.project_id != pid:
            raise UnknownSession(f"no session {sid!r}")
        with registry.lock(pid):
            if session.finalized:
                raise StaleRevision(
                    "session was already finalized; start a new session to revise"
                )
            project = registry.get(pid)
            stored = project.add_annotation(protocol_finalize(session.state), assign_revision=True)
            registry.put(pid, project)
            session.finalized = True
        return {"annotation": annotation_to_dict(stored)}

    # -- direct submission ----------------------------------------------------

    @app.post("/projects/{pid}/annotations", status_code=201)
    def submit_annotation(pid: str, body: AnnotationSubmit) -> dict:
        try:
            severities = {
                ErrorCategory(cat): Severity(level) for cat, level in body.severities.items()
            }
        except ValueError as exc:
            raise InvalidAnnotation(str(exc)) from exc
        candidate = Annotation(
            annotator_id=body.annotator_id,
            segment_id=body.segment_id,
            system_id=body.system_id,
            severities=severities,
            adp_applicable=body.adp_applicable,
        )
        with registry.lock(pid):
            project = registry.get(pid)
            violations = validate_annotation(candidate, project)
            gating = [v for v in violations if v.rule in ("adp-gated", "adp-not-applicable")]
            if gating:
                raise GatingViolation("; ".join(v.message for v in gating))
            if violations:
                raise UnknownReference("; ".join(v.message for v in violations))
            stored = project.add_annotation(candidate, assign_revision=True)
            registry.put(pid, project)
        return {"annotation": annotation_to_dict(stored)}

    # -- progress and reports -------------------------------------------------

    @app.get("/projects/{pid}/progress")
    def progress(pid: str) -> dict:
        project = registry.get(pid)
        pairs = _item_pairs(project)
        done_keys = authoritative_annotations(project)
        rows = []
        for annotator_id in project.annotators:
            completed = sum(
                1 for seg_id, sys_id in pairs if (annotator_id, seg_id, sys_id) in done_keys
            )
            percent = round_half_up(Fraction(100 * completed, len(pairs))) if pairs else 0
            rows.append(
                {
                    "annotator_id": annotator_id,
                    "completed": completed,
                    "total": len(pairs),
                    "percent": percent,
                }
            )
        return {"total_items": len(pairs), "annotators": rows}

    @app.get("/projects/{pid}/reports/{kind}")
    def report(pid: str, kind: str, format: str = "structured") -> Response:
        if kind not in REPORT_KINDS:
            raise UnknownReference(f"unknown report kind {kind!r}; expected one of {REPORT_KINDS}")
        if format not in REPORT_FORMATS:
            raise InvalidAnnotation(
                f"unknown format {format!r}; expected one of {REPORT_FORMATS}"
            )
        project = registry.get(pid)
        rendered = render(build_report(kind, project, project.config), format)
        return Response(content=rendered.encode("utf-8"), media_type=MEDIA_TYPES[format])

    return app

"""Executable decision-tree protocol for guided error annotation.

The tree is data: question nodes with yes/no branches, severity-prompt
leaves, and terminal leaves. A severity prompt may only hang off the yes
branch of a question; after the severity is recorded the walk resumes at
that question's no branch. This keeps the node graph a strict rooted tree
(every node has exactly one parent) while still visiting every category.

The built-in tree walks the categories in order FLU, PRN, TRM, GSMIS, ADP,
with the ADP question guarded: it is auto-skipped (treated as "no") as soon
as any meaning-transfer severity is recorded, so a walk can never produce
an ADP score alongside a meaning-transfer error.
"""

from __future__ import annotations

import json
from pathlib import Path
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Mapping, Union

from .errors import (
    MismatchedSegment,
    SessionComplete,
    SessionIncomplete,
    TreeInvalid,
    WrongResponseKind,
)
from .model import (
    MEANING_TRANSFER,
    Annotation,
    ErrorCategory,
    Segment,
    Severity,
    SystemOutput,
)

TREE_FORMAT = "posteval-tree/1"

YES = "yes"
NO = "no"

Response = Union[str, int, Severity]


class NodeKind(str, Enum):
    QUESTION = "question"
    SEVERITY = "severity"
    TERMINAL = "terminal"


class Guard(str, Enum):
    NO_MEANING_TRANSFER_ERROR = "no_meaning_transfer_error"


@dataclass(frozen=True)
class Node:
    node_id: str
    kind: NodeKind
    question: str = ""
    yes_branch: str | None = None
    no_branch: str | None = None
    category: ErrorCategory | None = None
    gated_by: Guard | None = None


@dataclass(frozen=True)
class DecisionTree:
    nodes: Mapping[str, Node]
    root: str
    version: str

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def parent_of(self, node_id: str) -> Node | None:
        for n in self.nodes.values():
            if node_id in (n.yes_branch, n.no_branch):
                return n
        return None


def validate_tree(tree: DecisionTree) -> None:
    """Raise TreeInvalid unless the tree satisfies all structural invariants."""
    if tree.root not in tree.nodes:
        raise TreeInvalid(f"root {tree.root!r} is not a node")

    parents: dict[str, str] = {}
    for n in tree.nodes.values():
        if n.kind is NodeKind.QUESTION:
            if not n.question:
                raise TreeInvalid(f"question node {n.node_id!r} has empty question text")
            for label, branch in ((YES, n.yes_branch), (NO, n.no_branch)):
                if branch is None:
                    raise TreeInvalid(f"question node {n.node_id!r} is missing its {label} branch")
                if branch not in tree.nodes:
                    raise TreeInvalid(f"node {n.node_id!r} references unknown node {branch!r}")
                if branch in parents:
                    raise TreeInvalid(
                        f"node {branch!r} has two parents ({parents[branch]!r} and {n.node_id!r}); "
                        "the graph must be a tree")
                parents[branch] = n.node_id
        elif n.kind is NodeKind.SEVERITY:
            if n.category is None:
                raise TreeInvalid(f"severity node {n.node_id!r} has no category")
            if n.yes_branch or n.no_branch:
                raise TreeInvalid(f"severity node {n.node_id!r} must be a leaf")
            if n.gated_by is not None:
                raise TreeInvalid(f"severity node {n.node_id!r} cannot carry a guard")
        elif n.kind is NodeKind.TERMINAL:
            if n.yes_branch or n.no_branch:
                raise TreeInvalid(f"terminal node {n.node_id!r} must be a leaf")

    if tree.root in parents:
        raise TreeInvalid(f"root {tree.root!r} must not be a child of any node")

    # Reachability: walk from root; with single parents this visits each node once.
    seen: set[str] = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen:
            raise TreeInvalid(f"cycle detected at node {nid!r}")
        seen.add(nid)
        n = tree.nodes[nid]
        stack.extend(b for b in (n.yes_branch, n.no_branch) if b is not None)
    unreachable = set(tree.nodes) - seen
    if unreachable:
        raise TreeInvalid(f"unreachable nodes: {sorted(unreachable)}")

    # Severity prompts must be yes-children so the resume-at-no-branch rule is total.
    for n in tree.nodes.values():
        if n.kind is not NodeKind.SEVERITY:
            continue
        parent_id = parents.get(n.node_id)
        if parent_id is None or tree.nodes[parent_id].yes_branch != n.node_id:
            raise TreeInvalid(
                f"severity node {n.node_id!r} must be the yes branch of a question node")

    if not any(n.kind is NodeKind.TERMINAL for n in tree.nodes.values()):
        raise TreeInvalid("tree has no terminal node")


# -- protocol state ----------------------------------------------------------

DONE = "done"


@dataclass(frozen=True)
class ProtocolState:
    """Immutable walk state; every transition returns a fresh value."""

    tree: DecisionTree
    segment_id: str
    system_id: str
    annotator_id: str
    cursor: str  # node id, or DONE
    partial: Mapping[ErrorCategory, Severity] = field(default_factory=dict)
    trail: tuple[tuple[str, str], ...] = ()

    @property
    def done(self) -> bool:
        return self.cursor == DONE

    def current_node(self) -> Node | None:
        return None if self.done else self.tree.node(self.cursor)


def _guard_fires(guard: Guard | None, partial: Mapping[ErrorCategory, Severity]) -> bool:
    if guard is Guard.NO_MEANING_TRANSFER_ERROR:
        return any(partial.get(c, Severity.NONE) > 0 for c in MEANING_TRANSFER)
    return False


def _advance(tree: DecisionTree, target: str, partial: Mapping[ErrorCategory, Severity]) -> str:
    """Resolve guards and terminals: returns the node awaiting input, or DONE."""
    while True:
        node = tree.node(target)
        if node.kind is NodeKind.TERMINAL:
            return DONE
        if node.kind is NodeKind.QUESTION and _guard_fires(node.gated_by, partial):
            target = node.no_branch  # skipped guard counts as "no"
            continue
        return target


def start_session(
    tree: DecisionTree, segment: Segment, system_output: SystemOutput, annotator_id: str
) -> ProtocolState:
    if segment.id != system_output.segment_id:
        raise MismatchedSegment(
            f"output belongs to segment {system_output.segment_id!r}, not {segment.id!r}")
    return ProtocolState(
        tree=tree,
        segment_id=segment.id,
        system_id=system_output.system_id,
        annotator_id=annotator_id,
        cursor=_advance(tree, tree.root, {}),
    )


def _parse_response(node: Node, response: Response) -> str:
    if node.kind is NodeKind.QUESTION:
        if isinstance(response, str) and response.lower() in (YES, NO):
            return response.lower()
        raise WrongResponseKind(
            f"node {node.node_id!r} expects yes/no, got {response!r}")
    if node.kind is NodeKind.SEVERITY:
        if isinstance(response, bool) or (isinstance(response, str) and not response.isdigit()):
            raise WrongResponseKind(
                f"node {node.node_id!r} expects a severity (0/1/2), got {response!r}")
        try:
            return str(int(Severity(int(response))))
        except (ValueError, TypeError):
            raise WrongResponseKind(
                f"node {node.node_id!r} expects a severity (0/1/2), got {response!r}") from None
    raise WrongResponseKind(f"node {node.node_id!r} does not take answers")


def answer(state: ProtocolState, response: Response) -> ProtocolState:
    """Apply one answer and return the advanced state."""
    if state.done:
        raise SessionComplete("the walk already reached the end of the tree")
    node = state.tree.node(state.cursor)
    token = _parse_response(node, response)
    trail = state.trail + ((node.node_id, token),)

    if node.kind is NodeKind.QUESTION:
        target = node.yes_branch if token == YES else node.no_branch
        partial = dict(state.partial)
    else:  # severity prompt
        sev = Severity(int(token))
        partial = dict(state.partial)
        partial[node.category] = max(partial.get(node.category, Severity.NONE), sev)
        parent = state.tree.parent_of(node.node_id)
        target = parent.no_branch  # resume where "no" would have gone

    cursor = _advance(state.tree, target, partial)
    return ProtocolState(
        tree=state.tree,
        segment_id=state.segment_id,
        system_id=state.system_id,
        annotator_id=state.annotator_id,
        cursor=cursor,
        partial=partial,
        trail=trail,
    )


def replay(
    tree: DecisionTree,
    segment: Segment,
    system_output: SystemOutput,
    annotator_id: str,
    trail: tuple[tuple[str, str], ...],
) -> ProtocolState:
    """Rebuild a state from its trail; the walk is deterministic by construction."""
    state = start_session(tree, segment, system_output, annotator_id)
    for node_id, token in trail:
        if state.done or state.cursor != node_id:
            raise SessionIncomplete(
                f"trail entry {node_id!r} does not match cursor {state.cursor!r}")
        state = answer(state, token)
    return state


def finalize(state: ProtocolState) -> Annotation:
    """Emit the annotation for a completed walk.

    All five categories are populated (unvisited ones at 0) and
    adp_applicable reflects whether a meaning-transfer error gated ADP away.
    """
    if not state.done:
        raise SessionIncomplete(f"walk is still at node {state.cursor!r}")
    severities = {cat: state.partial.get(cat, Severity.NONE) for cat in ErrorCategory}
    mt_hit = any(severities[c] > 0 for c in MEANING_TRANSFER)
    if mt_hit:
        severities[ErrorCategory.ADP] = Severity.NONE
    return Annotation(
        annotator_id=state.annotator_id,
        segment_id=state.segment_id,
        system_id=state.system_id,
        severities=severities,
        adp_applicable=not mt_hit,
        revision=1,
    )


# -- built-in tree and the on-disk format ------------------------------------

def default_tree() -> DecisionTree:
    """The built-in taxonomy tree.

    Question wording is editable guidance, not canon; revise via a tree file
    rather than in code when the taxonomy evolves.
    """
    q = NodeKind.QUESTION
    s = NodeKind.SEVERITY
    nodes = [
        Node("q_flu", q,
             "Ignoring the source for a moment: does the translation contain grammatical "
             "or other linguistic errors in the MSA itself?",
             yes_branch="p_flu", no_branch="q_prn", category=ErrorCategory.FLU),
        Node("p_flu", s, "How severe is the fluency error? (1 = minor, 2 = major)",
             category=ErrorCategory.FLU),
        Node("q_prn", q,
             "Is a proper name (person, place, organization) translated incorrectly?",
             yes_branch="p_prn", no_branch="q_trm", category=ErrorCategory.PRN),
        Node("p_prn", s, "How severe is the proper-name error? (1 = minor, 2 = major)",
             category=ErrorCategory.PRN),
        Node("q_trm", q,
             "Is a dialect-specific term left untranslated or mistranslated in a way "
             "that alters the meaning?",
             yes_branch="p_trm", no_branch="q_gsmis", category=ErrorCategory.TRM),
        Node("p_trm", s, "How severe is the dialect-term error? (1 = minor, 2 = major)",
             category=ErrorCategory.TRM),
        Node("q_gsmis", q,
             "Is the meaning otherwise changed (omission, addition, or any other "
             "semantic shift)?",
             yes_branch="p_gsmis", no_branch="q_adp", category=ErrorCategory.GSMIS),
        Node("p_gsmis", s, "How severe is the semantic error? (1 = minor, 2 = major)",
             category=ErrorCategory.GSMIS),
        Node("q_adp", q,
             "Is the translation unnatural or inappropriate in tone, style, or intent?",
             yes_branch="p_adp", no_branch="end", category=ErrorCategory.ADP,
             gated_by=Guard.NO_MEANING_TRANSFER_ERROR),
        Node("p_adp", s, "How severe is the adaptation error? (1 = minor, 2 = major)",
             category=ErrorCategory.ADP),
        Node("end", NodeKind.TERMINAL),
    ]
    tree = DecisionTree(nodes={n.node_id: n for n in nodes}, root="q_flu", version="builtin-1")
    validate_tree(tree)
    return tree


def tree_to_dict(tree: DecisionTree) -> dict:
    nodes = {}
    for n in tree.nodes.values():
        entry: dict = {"kind": n.kind.value}
        if n.question:
            entry["question"] = n.question
        if n.kind is NodeKind.QUESTION:
            entry["yes"] = n.yes_branch
            entry["no"] = n.no_branch
            if n.gated_by is not None:
                entry["gated_by"] = n.gated_by.value
        if n.category is not None:
            entry["category"] = n.category.value
        nodes[n.node_id] = entry
    return {"format": TREE_FORMAT, "version": tree.version, "root": tree.root, "nodes": nodes}


def tree_from_dict(data: dict) -> DecisionTree:
    if not isinstance(data, dict) or data.get("format") != TREE_FORMAT:
        raise TreeInvalid(f"not a {TREE_FORMAT} document")
    try:
        nodes = {}
        for node_id, entry in data["nodes"].items():
            kind = NodeKind(entry["kind"])
            nodes[node_id] = Node(
                node_id=node_id,
                kind=kind,
                question=entry.get("question", ""),
                yes_branch=entry.get("yes"),
                no_branch=entry.get("no"),
                category=ErrorCategory(entry["category"]) if "category" in entry else None,
                gated_by=Guard(entry["gated_by"]) if "gated_by" in entry else None,
            )
        tree = DecisionTree(nodes=nodes, root=data["root"], version=str(data.get("version", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise TreeInvalid(f"malformed tree document: {exc}") from exc
    validate_tree(tree)
    return tree


def dump_tree(tree: DecisionTree) -> str:
    return json.dumps(tree_to_dict(tree), indent=2, ensure_ascii=False) + "\n"


def load_tree(source) -> DecisionTree:
    """Load a tree from JSON text, an open text stream, or a Path, and validate it."""
    if hasattr(source, "read"):
        text = source.read()
    elif isinstance(source, str):
        text = source
    else:
        text = Path(source).read_text("utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeInvalid(f"not valid JSON: {exc}") from exc
    return tree_from_dict(data)


def builtin_tree_text() -> str:
    """The packaged copy of the default tree file."""
    return resources.files("posteval.data").joinpath("default_tree.json").read_text("utf-8")

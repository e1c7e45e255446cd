"""Bundled synthetic demonstration project.

Twenty Dialectal-Arabic/MSA segment pairs, three fictitious systems (alpha,
bravo, charlie), and two simulated annotators whose judgments are generated
by walking the built-in decision tree with a seeded RNG. All text and scores
here are synthetic: the project exists so that every CLI command and service
endpoint is runnable out of the box, not to reproduce any published result.
"""

from __future__ import annotations

import random

from .model import ErrorCategory, Project, Segment, Severity, SystemOutput
from .protocol import NodeKind, answer, default_tree, finalize, start_session

DEMO_SEED = 7319
DEMO_NAME = "demo-synthetic"
DEMO_SYSTEMS = ("alpha", "bravo", "charlie")
DEMO_ANNOTATORS = ("annotator-1", "annotator-2")

# (dialect source, MSA reference) pairs; mixed Gulf/Levantine/Egyptian flavor.
SEGMENT_PAIRS = (
    ("شلونك اليوم؟", "كيف حالك اليوم؟"),
    ("وين رايح هسه؟", "إلى أين تذهب الآن؟"),
    ("شو بدك من السوق؟", "ماذا تريد من السوق؟"),
    ("معليش، نسيت الموعد", "عذرا، لقد نسيت الموعد"),
    ("هاد الكتاب كتير حلو", "هذا الكتاب جميل جدا"),
    ("ما عندي فلوس اليوم", "لا أملك نقودا اليوم"),
    ("تعال عندنا بكرة", "تعال إلينا غدا"),
    ("ليش ما جيت امبارح؟", "لماذا لم تأت أمس؟"),
    ("أنا جوعان بزاف", "أنا جائع جدا"),
    ("البيت بعيد شوي", "البيت بعيد قليلا"),
    ("اشتريت عربية جديدة من زمان", "اشتريت سيارة جديدة منذ زمن"),
    ("خلينا نروح عالبحر", "دعنا نذهب إلى البحر"),
    ("الدنيا حر اليوم", "الطقس حار اليوم"),
    ("ما فهمت عليك، عيد الكلام", "لم أفهمك، أعد الكلام"),
    ("عندك حق، الفكرة زينة", "أنت محق، الفكرة جيدة"),
    ("الولد نايم من الظهر", "الولد نائم منذ الظهر"),
    ("شفت صاحبك في الشارع", "رأيت صديقك في الشارع"),
    ("القهوة هني غالية مرة", "القهوة هنا غالية جدا"),
    ("يلا نمشي قبل ما تمطر", "هيا نمشي قبل أن تمطر"),
    ("كان ودي أشوفك أمس", "كنت أتمنى أن أراك أمس"),
)


def _hypothesis(rng: random.Random, da: str, msa: str) -> str:
    """A plausible-looking synthetic system output."""
    words = msa.split()
    roll = rng.random()
    if roll < 0.45:
        return msa
    if roll < 0.65 and len(words) > 2:
        return " ".join(words[:-1])  # dropped word
    if roll < 0.85:
        return da  # left untranslated
    return " ".join(words) + " تقريبا"  # spurious tail


def _target_severities(rng: random.Random,
                       anchor: dict[ErrorCategory, Severity] | None,
                       ) -> dict[ErrorCategory, Severity]:
    """Severity targets for one walk; correlated with the first annotator's."""
    out: dict[ErrorCategory, Severity] = {}
    for cat in ErrorCategory:
        if anchor is not None and rng.random() < 0.75:
            out[cat] = anchor[cat]
        else:
            out[cat] = Severity(rng.choices((0, 1, 2), weights=(18, 4, 1))[0])
    return out


def _walk(tree, segment, output, annotator_id, targets) -> "Annotation":
    """Drive the guided walkthrough toward the target severities."""
    state = start_session(tree, segment, output, annotator_id)
    while not state.done:
        node = state.current_node()
        if node.kind is NodeKind.QUESTION:
            wanted = targets.get(node.category, Severity.NONE)
            state = answer(state, "yes" if wanted > 0 else "no")
        else:
            state = answer(state, int(targets[node.category]))
    return finalize(state)


def demo_project(seed: int = DEMO_SEED) -> Project:
    """Build the synthetic project; the same seed yields the same project."""
    rng = random.Random(seed)
    tree = default_tree()
    project = Project(name=DEMO_NAME)
    project.annotators.extend(DEMO_ANNOTATORS)

    for i, (da, msa) in enumerate(SEGMENT_PAIRS):
        project.add_segment(Segment(f"seg-{i + 1:04d}", da, msa))
    for system_id in DEMO_SYSTEMS:
        for seg in project.segments:
            project.add_output(SystemOutput(
                seg.id, system_id, _hypothesis(rng, seg.source_da, seg.gold_msa)))

    for system_id in DEMO_SYSTEMS:
        for seg in project.segments:
            output = project.output_for(seg.id, system_id)
            first_targets = _target_severities(rng, None)
            second_targets = _target_severities(rng, first_targets)
            for annotator_id, targets in zip(
                    DEMO_ANNOTATORS, (first_targets, second_targets)):
                walked = _walk(tree, seg, output, annotator_id, targets)
                project.add_annotation(walked, assign_revision=True)
    return project

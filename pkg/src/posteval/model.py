"""Core domain model: error taxonomy, severity scale, annotations, projects.

All types are immutable values except Project, whose annotation log is
append-only (append via Project.add_annotation, never mutate in place).
Arabic text fields are opaque strings; no normalization is applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import DuplicateRevision

__all__ = [
    "Severity",
    "CategoryGroup",
    "ErrorCategory",
    "MEANING_TRANSFER",
    "CATEGORY_ORDER",
    "Segment",
    "SystemOutput",
    "Annotation",
    "AggregationMode",
    "ScoringConfig",
    "Project",
    "Violation",
    "validate_annotation",
    "authoritative_annotations",
]


class Severity(IntEnum):
    """Ordinal error severity: 0 = no error, 1 = minor, 2 = major."""

    NONE = 0
    MINOR = 1
    MAJOR = 2


class CategoryGroup(str, Enum):
    FLUENCY = "Fluency"
    MEANING_TRANSFER = "MeaningTransfer"
    ADAPTATION = "Adaptation"


class ErrorCategory(str, Enum):
    """The five error categories of the taxonomy."""

    FLU = "FLU"      # fluency: grammatical/linguistic errors in the MSA output
    PRN = "PRN"      # proper name mistranslation
    TRM = "TRM"      # dialect-specific term untranslated or mistranslated
    GSMIS = "GSMIS"  # general semantic mistranslation (omissions, additions, shifts)
    ADP = "ADP"      # adaptation: unnatural tone, style, or intent

    @property
    def group(self) -> CategoryGroup:
        return _GROUPS[self]


_GROUPS = {
    ErrorCategory.FLU: CategoryGroup.FLUENCY,
    ErrorCategory.PRN: CategoryGroup.MEANING_TRANSFER,
    ErrorCategory.TRM: CategoryGroup.MEANING_TRANSFER,
    ErrorCategory.GSMIS: CategoryGroup.MEANING_TRANSFER,
    ErrorCategory.ADP: CategoryGroup.ADAPTATION,
}

# Meaning-transfer subcategories, in protocol order.
MEANING_TRANSFER = (ErrorCategory.PRN, ErrorCategory.TRM, ErrorCategory.GSMIS)

# Canonical category order (questionnaire column order).
CATEGORY_ORDER = (
    ErrorCategory.FLU,
    ErrorCategory.PRN,
    ErrorCategory.TRM,
    ErrorCategory.GSMIS,
    ErrorCategory.ADP,
)


@dataclass(frozen=True)
class Segment:
    """One corpus unit: dialectal source plus its reference MSA translation."""

    id: str
    source_da: str
    gold_msa: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("segment id must be non-empty")
        if not self.source_da or not self.gold_msa:
            raise ValueError(f"segment {self.id}: source_da and gold_msa must be non-empty")


@dataclass(frozen=True)
class SystemOutput:
    """One MT system's hypothesis for one segment."""

    segment_id: str
    system_id: str
    hypothesis: str


@dataclass(frozen=True)
class Annotation:
    """One annotator's five severity judgments for one (segment, system) pair.

    The severities map is total: categories missing from the input are filled
    with severity 0 (an empty questionnaire cell means "no error"). Invalid
    combinations (e.g. ADP scored despite a meaning-transfer error) are
    constructible on purpose so that validate_annotation can report them.
    """

    annotator_id: str
    segment_id: str
    system_id: str
    severities: Mapping[ErrorCategory, Severity]
    adp_applicable: bool = True
    revision: int = 1

    def __post_init__(self):
        full = {}
        for cat in CATEGORY_ORDER:
            full[cat] = Severity(self.severities.get(cat, 0))
        object.__setattr__(self, "severities", full)

    def severity(self, cat: ErrorCategory) -> Severity:
        return self.severities[cat]

    def has_meaning_transfer_error(self) -> bool:
        return any(self.severities[c] > 0 for c in MEANING_TRANSFER)

    def key(self) -> tuple[str, str, str]:
        return (self.annotator_id, self.segment_id, self.system_id)


class AggregationMode(str, Enum):
    PER_ANNOTATOR = "per-annotator"
    MEAN_ACROSS_ANNOTATORS = "mean-across-annotators"


@dataclass(frozen=True)
class ScoringConfig:
    """Scoring parameters; all score arithmetic is exact (Fraction)."""

    adp_weight: Fraction = Fraction(1, 2)
    minor_upper: Fraction = Fraction(1)
    min_project_size: int = 200
    annotator_aggregation: AggregationMode = AggregationMode.MEAN_ACROSS_ANNOTATORS
    # Only consulted when annotator_aggregation is PER_ANNOTATOR.
    aggregation_annotator: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "adp_weight", Fraction(self.adp_weight))
        object.__setattr__(self, "minor_upper", Fraction(self.minor_upper))
        object.__setattr__(self, "annotator_aggregation", AggregationMode(self.annotator_aggregation))
        if not (0 < self.adp_weight <= 1):
            raise ValueError(f"adp_weight must be in (0, 1], got {self.adp_weight}")
        if self.minor_upper <= 0:
            raise ValueError(f"minor_upper must be positive, got {self.minor_upper}")


@dataclass
class Project:
    """A named evaluation project: corpus, outputs, annotators, annotation log.

    The annotation collection is append-only; for a given (annotator, segment,
    system) triple the entry with the highest revision is authoritative.
    """

    name: str
    segments: list[Segment] = field(default_factory=list)
    outputs: list[SystemOutput] = field(default_factory=list)
    annotators: list[str] = field(default_factory=list)
    taxonomy: "object | None" = None  # protocol.DecisionTree; import cycle kept out on purpose
    config: ScoringConfig = field(default_factory=ScoringConfig)
    annotations: list[Annotation] = field(default_factory=list)

    # -- lookups ------------------------------------------------------------

    def segment_by_id(self, segment_id: str) -> Segment | None:
        return self._segment_index().get(segment_id)

    def output_for(self, segment_id: str, system_id: str) -> SystemOutput | None:
        return self._output_index().get((segment_id, system_id))

    def system_ids(self) -> list[str]:
        """Distinct system ids in first-appearance (project) order."""
        seen: dict[str, None] = {}
        for out in self.outputs:
            seen.setdefault(out.system_id, None)
        return list(seen)

    def _segment_index(self) -> dict[str, Segment]:
        return {s.id: s for s in self.segments}

    def _output_index(self) -> dict[tuple[str, str], SystemOutput]:
        return {(o.segment_id, o.system_id): o for o in self.outputs}

    # -- mutation (single-writer; see service module for locking) -----------

    def add_segment(self, segment: Segment) -> None:
        if segment.id in self._segment_index():
            raise ValueError(f"duplicate segment id {segment.id!r}")
        self.segments.append(segment)

    def add_output(self, output: SystemOutput) -> None:
        if (output.segment_id, output.system_id) in self._output_index():
            raise ValueError(
                f"duplicate output for segment {output.segment_id!r} / system {output.system_id!r}"
            )
        self.outputs.append(output)

    def next_revision(self, annotator_id: str, segment_id: str, system_id: str) -> int:
        key = (annotator_id, segment_id, system_id)
        revs = [a.revision for a in self.annotations if a.key() == key]
        return max(revs, default=0) + 1

    def add_annotation(self, annotation: Annotation, *, assign_revision: bool = False) -> Annotation:
        """Append to the log. Revision uniqueness per triple is enforced here.

        With assign_revision=True the stored copy gets the next free revision
        for its triple, regardless of the revision carried by the input.
        """
        if assign_revision:
            annotation = replace(annotation, revision=self.next_revision(*annotation.key()))
        for existing in self.annotations:
            if existing.key() == annotation.key() and existing.revision == annotation.revision:
                raise DuplicateRevision(
                    f"revision {annotation.revision} already recorded for "
                    f"annotator {annotation.annotator_id!r}, segment {annotation.segment_id!r}, "
                    f"system {annotation.system_id!r}"
                )
        self.annotations.append(annotation)
        return annotation


@dataclass(frozen=True)
class Violation:
    """One broken rule found by validate_annotation."""

    rule: str
    category: ErrorCategory | None
    message: str


def gating_violations(a: Annotation) -> list[Violation]:
    """Annotation-internal rule checks (no project references needed)."""
    violations: list[Violation] = []
    mt_hits = [c for c in MEANING_TRANSFER if a.severities[c] > 0]
    adp = a.severities[ErrorCategory.ADP]
    if mt_hits:
        if adp > 0:
            violations.append(Violation(
                "adp-gated", ErrorCategory.ADP,
                "ADP assessed despite meaning-transfer error "
                f"({', '.join(c.value for c in mt_hits)})"))
        if a.adp_applicable:
            violations.append(Violation(
                "adp-gated", ErrorCategory.ADP,
                "adp_applicable must be false when a meaning-transfer error is recorded "
                f"({', '.join(c.value for c in mt_hits)})"))
    if not a.adp_applicable and adp > 0:
        violations.append(Violation(
            "adp-not-applicable", ErrorCategory.ADP,
            "ADP severity recorded although adaptation was marked not applicable"))
    return violations


def validate_annotation(a: Annotation, p: Project) -> list[Violation]:
    """Check an annotation against the gating rules and project references.

    Returns an empty list when the annotation is acceptable; otherwise one
    Violation per broken rule. Unknown references are violations, not crashes.
    """
    violations: list[Violation] = []

    if a.annotator_id not in p.annotators:
        violations.append(Violation(
            "unknown-reference", None, f"annotator {a.annotator_id!r} is not registered in the project"))
    if p.segment_by_id(a.segment_id) is None:
        violations.append(Violation(
            "unknown-reference", None, f"segment {a.segment_id!r} does not exist in the project"))
    elif p.output_for(a.segment_id, a.system_id) is None:
        violations.append(Violation(
            "unknown-reference", None,
            f"no output recorded for segment {a.segment_id!r} and system {a.system_id!r}"))

    violations.extend(gating_violations(a))
    return violations


def authoritative_annotations(p: Project) -> dict[tuple[str, str, str], Annotation]:
    """Latest-revision annotation per (annotator, segment, system) triple."""
    best: dict[tuple[str, str, str], Annotation] = {}
    for a in p.annotations:
        cur = best.get(a.key())
        if cur is None or a.revision > cur.revision:
            best[a.key()] = a
    return best


def annotators_for(p: Project, segment_id: str, system_id: str) -> list[str]:
    """Annotators holding an authoritative annotation for the pair, in project order."""
    auth = authoritative_annotations(p)
    return [ann for ann in p.annotators if (ann, segment_id, system_id) in auth]


def annotations_for_pair(
    p: Project, segment_id: str, system_id: str, annotators: Iterable[str] | None = None
) -> list[Annotation]:
    """Authoritative annotations for one (segment, system) pair."""
    auth = authoritative_annotations(p)
    pool = p.annotators if annotators is None else list(annotators)
    return [auth[(ann, segment_id, system_id)] for ann in pool if (ann, segment_id, system_id) in auth]

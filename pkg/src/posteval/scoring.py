"""Segment scoring: SEGS values, severity buckets, per-system aggregates.

All arithmetic is exact rational arithmetic (fractions.Fraction). Scores
like 196.25 arise from averaging half-weighted adaptation scores across two
annotators; exactness keeps totals-consistency checks tolerance-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

import math

from .errors import InvalidAnnotation, MissingAnnotations, NoAnnotations
from .model import (
    CATEGORY_ORDER,
    AggregationMode,
    Annotation,
    ErrorCategory,
    Project,
    ScoringConfig,
    annotations_for_pair,
    gating_violations,
    validate_annotation,
)


class Bucket(str, Enum):
    NO_EDIT = "NoEdit"
    MINOR = "Minor"
    MAJOR = "Major"


# Basis markers recorded on aggregate results.
MEAN_BASIS = ("mean-across-annotators",)


def per_annotator_basis(annotator_id: str) -> tuple[str, str]:
    return ("per-annotator", annotator_id)


@dataclass(frozen=True)
class SegmentScore:
    segment_id: str
    system_id: str
    segs: Fraction
    bucket: Bucket
    basis: tuple


@dataclass(frozen=True)
class SeverityDistribution:
    """Bucket counts for one system across all segments."""

    system_id: str
    counts: Mapping[Bucket, int]
    total_segments: int

    def percentages(self) -> dict[Bucket, int]:
        """Integer percentages, rounded half-up; may sum to 99-101."""
        return {
            b: round_half_up(Fraction(100 * self.counts[b], self.total_segments))
            for b in Bucket
        }


@dataclass(frozen=True)
class CategoryTotals:
    """Accumulated per-category scores for one system.

    The ADP entry is stored already multiplied by the adaptation weight, so
    grand_total is the plain sum of the five entries and equals the sum of
    all aggregated segment SEGS.
    """

    system_id: str
    totals: Mapping[ErrorCategory, Fraction]
    grand_total: Fraction


def round_half_up(x: Fraction) -> int:
    """Half-up integer rounding for non-negative rationals: floor(x + 1/2)."""
    return math.floor(x + Fraction(1, 2))


def format_fraction(x: Fraction, places: int) -> str:
    """Exact decimal rendering with half-up rounding (no float detour)."""
    if places == 0:
        return str(round_half_up(Fraction(x)))
    scaled = round_half_up(Fraction(x) * 10 ** places)
    digits = str(scaled).rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}"


def segs(a: Annotation, cfg: ScoringConfig, project: Project | None = None) -> Fraction:
    """FLU + PRN + TRM + GSMIS + adp_weight * ADP.

    Gating rules are always checked (the score is meaningless on a violating
    annotation); project references are checked too when a project is given.
    """
    violations = validate_annotation(a, project) if project is not None else gating_violations(a)
    if violations:
        raise InvalidAnnotation("; ".join(v.message for v in violations))
    total = Fraction(0)
    for cat in CATEGORY_ORDER:
        sev = Fraction(int(a.severities[cat]))
        total += sev * cfg.adp_weight if cat is ErrorCategory.ADP else sev
    return total


def segs_aggregated(annotations: Iterable[Annotation], cfg: ScoringConfig) -> Fraction:
    """Aggregate SEGS for one (segment, system) pair across annotators."""
    pool = list(annotations)
    if cfg.annotator_aggregation is AggregationMode.PER_ANNOTATOR:
        pool = [a for a in pool if a.annotator_id == cfg.aggregation_annotator]
    if not pool:
        raise NoAnnotations("no annotations to aggregate for the requested basis")
    values = [segs(a, cfg) for a in pool]
    if cfg.annotator_aggregation is AggregationMode.PER_ANNOTATOR:
        return values[0]
    return sum(values, Fraction(0)) / len(values)


def bucket(value: Fraction, cfg: ScoringConfig) -> Bucket:
    """Total, disjoint partition: 0 / (0, minor_upper] / (minor_upper, inf)."""
    value = Fraction(value)
    if value < 0:
        raise ValueError(f"SEGS must be non-negative, got {value}")
    if value == 0:
        return Bucket.NO_EDIT
    if value <= cfg.minor_upper:
        return Bucket.MINOR
    return Bucket.MAJOR


def _basis(cfg: ScoringConfig) -> tuple:
    if cfg.annotator_aggregation is AggregationMode.PER_ANNOTATOR:
        return per_annotator_basis(cfg.aggregation_annotator or "")
    return MEAN_BASIS


def _covered_pairs(project: Project, system_id: str, cfg: ScoringConfig) -> list[tuple[str, list[Annotation]]]:
    """Authoritative annotations per segment for one system; errors on gaps."""
    rows = []
    uncovered = []
    for seg in project.segments:
        anns = annotations_for_pair(project, seg.id, system_id)
        if cfg.annotator_aggregation is AggregationMode.PER_ANNOTATOR:
            anns = [a for a in anns if a.annotator_id == cfg.aggregation_annotator]
        if anns:
            rows.append((seg.id, anns))
        else:
            uncovered.append(seg.id)
    if uncovered:
        raise MissingAnnotations(
            f"system {system_id!r} has {len(uncovered)} unannotated segment(s)", uncovered)
    return rows


def segment_scores(project: Project, system_id: str, cfg: ScoringConfig) -> list[SegmentScore]:
    """Aggregated SEGS + bucket for every segment, in corpus order."""
    basis = _basis(cfg)
    out = []
    for seg_id, anns in _covered_pairs(project, system_id, cfg):
        value = segs_aggregated(anns, cfg)
        out.append(SegmentScore(seg_id, system_id, value, bucket(value, cfg), basis))
    return out


def severity_distribution(project: Project, system_id: str, cfg: ScoringConfig) -> SeverityDistribution:
    counts = {b: 0 for b in Bucket}
    scores = segment_scores(project, system_id, cfg)
    for score in scores:
        counts[score.bucket] += 1
    return SeverityDistribution(system_id=system_id, counts=counts, total_segments=len(scores))


def category_totals(project: Project, system_id: str, cfg: ScoringConfig) -> CategoryTotals:
    """Per-category accumulated scores (ADP pre-weighted) plus the grand total.

    The grand total is checked against the independent sum of aggregated
    segment SEGS; the two are equal by construction and this guards against
    regressions in either path.
    """
    totals = {cat: Fraction(0) for cat in CATEGORY_ORDER}
    for _seg_id, anns in _covered_pairs(project, system_id, cfg):
        for cat in CATEGORY_ORDER:
            values = [Fraction(int(a.severities[cat])) for a in anns]
            agg = values[0] if cfg.annotator_aggregation is AggregationMode.PER_ANNOTATOR \
                else sum(values, Fraction(0)) / len(values)
            totals[cat] += agg * cfg.adp_weight if cat is ErrorCategory.ADP else agg
    grand = sum(totals.values(), Fraction(0))

    check = sum((s.segs for s in segment_scores(project, system_id, cfg)), Fraction(0))
    if check != grand:
        raise AssertionError(
            f"totals inconsistency for system {system_id!r}: {grand} != sum of SEGS {check}")
    return CategoryTotals(system_id=system_id, totals=totals, grand_total=grand)

"""Annotation sheet import and export.

Sheets are delimiter-separated UTF-8 text (tab or comma, auto-detected from
the header) with the fixed column set DA, GOLD, MT, FLU, PRN, TRM, GSMIS,
ADP, TOTAL: source text, reference translation, system hypothesis, five
severity cells, and a recomputed score column. An empty severity cell means
severity 0. One sheet covers one (system, annotator) pair.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BadHeader,
    BadSeverityCell,
    EncodingError,
    GatingViolation,
    UnknownAnnotator,
    UnknownSystem,
)
from .model import (
    MEANING_TRANSFER,
    Annotation,
    ErrorCategory,
    Project,
    Segment,
    Severity,
    SystemOutput,
    authoritative_annotations,
    validate_annotation,
)
from .scoring import format_fraction, segs

HEADER = ("DA", "GOLD", "MT", "FLU", "PRN", "TRM", "GSMIS", "ADP", "TOTAL")
CORPUS_HEADER = ("DA", "GOLD", "MT")
SEVERITY_COLUMNS = ("FLU", "PRN", "TRM", "GSMIS", "ADP")


@dataclass(frozen=True)
class RejectedRow:
    row: int  # 1-based data row number (header not counted)
    error: str
    detail: str


@dataclass
class ImportResult:
    annotations: list[Annotation] = field(default_factory=list)
    new_segments: list[Segment] = field(default_factory=list)
    new_outputs: list[SystemOutput] = field(default_factory=list)
    rejected: list[RejectedRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def total_rows(self) -> int:
        return len(self.annotations) + len(self.rejected)


def _read_text(stream) -> str:
    if stream is None:
        raise EncodingError("no sheet data given")
    data = stream.read() if hasattr(stream, "read") else stream
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"sheet is not valid UTF-8: {exc}") from exc
    return data


def _parse_severity(cell: str, row: int, column: str) -> Severity:
    value = cell.strip()
    if value == "":
        return Severity.NONE
    if value in ("0", "1", "2"):
        return Severity(int(value))
    raise BadSeverityCell(row, column, cell)


def _loose_decimal(cell: str) -> str | None:
    """Normalize a hand-entered total like '1,5' or '1.50' to 2-dp form."""
    try:
        return format_fraction(Fraction(cell.replace(",", ".")), 2)
    except (ValueError, ZeroDivisionError):
        return None


def import_sheet(
    stream,
    system_id: str,
    annotator_id: str,
    project: Project,
    dry_run: bool = False,
) -> ImportResult:
    """Parse one sheet and append its rows to the project.

    Segments are matched to existing ones by exact (source, reference) text
    pair, otherwise created. Every row is either converted into an annotation
    or reported in `rejected` with its row number and reason; nothing is
    dropped silently. With dry_run=True the project is left untouched.
    """
    text = _read_text(stream)
    if not text.strip():
        raise BadHeader("sheet is empty")
    delimiter = "\t" if "\t" in text.splitlines()[0] else ","
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = tuple(cell.strip() for cell in next(reader))
    if header != HEADER:
        raise BadHeader(f"expected columns {list(HEADER)}, got {list(header)}")

    result = ImportResult()
    converted: list[tuple[int, Annotation]] = []
    by_text = {(s.source_da, s.gold_msa): s for s in project.segments}
    outputs = {(o.segment_id, o.system_id): o for o in project.outputs}
    taken_ids = {s.id for s in project.segments}
    next_seq = len(project.segments)

    for row_num, cells in enumerate(reader, start=1):
        if not any(c.strip() for c in cells):
            continue  # blank line
        if len(cells) != len(HEADER):
            result.rejected.append(RejectedRow(
                row_num, "BadRow", f"row {row_num}: expected {len(HEADER)} cells, got {len(cells)}"))
            continue
        da, gold, mt = cells[0], cells[1], cells[2]

        try:
            severities = {
                ErrorCategory(col): _parse_severity(cells[3 + i], row_num, col)
                for i, col in enumerate(SEVERITY_COLUMNS)
            }
        except BadSeverityCell as exc:
            result.rejected.append(RejectedRow(row_num, "BadSeverityCell", str(exc)))
            continue

        mt_hit = any(severities[c] > 0 for c in MEANING_TRANSFER)
        if mt_hit and severities[ErrorCategory.ADP] > 0:
            exc = GatingViolation(
                f"row {row_num}: ADP scored despite meaning-transfer error", row=row_num)
            result.rejected.append(RejectedRow(row_num, "GatingViolation", str(exc)))
            continue

        segment = by_text.get((da, gold))
        created_segment = None
        if segment is None:
            next_seq += 1
            seg_id = f"seg-{next_seq:04d}"
            while seg_id in taken_ids:
                next_seq += 1
                seg_id = f"seg-{next_seq:04d}"
            try:
                created_segment = Segment(id=seg_id, source_da=da, gold_msa=gold)
            except ValueError as exc:
                result.rejected.append(RejectedRow(row_num, "BadRow", f"row {row_num}: {exc}"))
                continue
            segment = created_segment

        existing_output = outputs.get((segment.id, system_id))
        created_output = None
        if existing_output is None:
            created_output = SystemOutput(segment_id=segment.id, system_id=system_id, hypothesis=mt)
        elif existing_output.hypothesis != mt:
            result.rejected.append(RejectedRow(
                row_num, "HypothesisMismatch",
                f"row {row_num}: MT cell differs from the hypothesis already recorded "
                f"for segment {segment.id!r} and system {system_id!r}"))
            continue

        annotation = Annotation(
            annotator_id=annotator_id,
            segment_id=segment.id,
            system_id=system_id,
            severities=severities,
            adp_applicable=not mt_hit,
        )

        # Recompute the row total; a disagreeing hand-summed cell is only a warning.
        total_cell = cells[8].strip()
        if total_cell:
            expected = format_fraction(segs(annotation, project.config), 2)
            if total_cell != expected and _loose_decimal(total_cell) != expected:
                result.warnings.append(
                    f"row {row_num}: TOTAL cell {total_cell!r} disagrees with recomputed {expected}")

        # Commit row-local state so later rows in this sheet see it.
        if created_segment is not None:
            by_text[(da, gold)] = created_segment
            taken_ids.add(created_segment.id)
            result.new_segments.append(created_segment)
        if created_output is not None:
            outputs[(created_output.segment_id, created_output.system_id)] = created_output
            result.new_outputs.append(created_output)
        converted.append((row_num, annotation))

    if dry_run:
        result.annotations = [ann for _, ann in converted]
        return result

    for seg in result.new_segments:
        project.add_segment(seg)
    for out in result.new_outputs:
        project.add_output(out)
    if annotator_id not in project.annotators:
        project.annotators.append(annotator_id)
    for row_num, ann in converted:
        bad = validate_annotation(ann, project)
        if bad:
            result.rejected.append(RejectedRow(
                row_num, "InvalidAnnotation",
                f"row {row_num}: " + "; ".join(v.message for v in bad)))
            continue
        result.annotations.append(project.add_annotation(ann, assign_revision=True))
    return result


def import_corpus(stream, system_id: str, project: Project, dry_run: bool = False) -> ImportResult:
    """Register segments and one system's hypotheses from a three-column sheet.

    Same conventions as the annotation sheet minus the severity block: the
    header is DA,GOLD,MT and rows carry source, reference, and hypothesis.
    Rows whose (source, reference) pair is already known reuse the existing
    segment; an identical re-listed output is reported as a warning, a
    conflicting one is rejected.
    """
    text = _read_text(stream)
    if not text.strip():
        raise BadHeader("corpus sheet is empty")
    delimiter = "\t" if "\t" in text.splitlines()[0] else ","
    reader = csv.reader(io.StringIO(text), delimiter=delimiter)
    header = tuple(cell.strip() for cell in next(reader))
    if header != CORPUS_HEADER:
        raise BadHeader(f"expected columns {list(CORPUS_HEADER)}, got {list(header)}")

    result = ImportResult()
    by_text = {(s.source_da, s.gold_msa): s for s in project.segments}
    outputs = {(o.segment_id, o.system_id): o for o in project.outputs}
    taken_ids = {s.id for s in project.segments}
    next_seq = len(project.segments)

    for row_num, cells in enumerate(reader, start=1):
        if not any(c.strip() for c in cells):
            continue  # blank line
        if len(cells) != len(CORPUS_HEADER):
            result.rejected.append(RejectedRow(
                row_num, "BadRow",
                f"row {row_num}: expected {len(CORPUS_HEADER)} cells, got {len(cells)}"))
            continue
        da, gold, mt = cells

        segment = by_text.get((da, gold))
        created_segment = None
        if segment is None:
            next_seq += 1
            seg_id = f"seg-{next_seq:04d}"
            while seg_id in taken_ids:
                next_seq += 1
                seg_id = f"seg-{next_seq:04d}"
            try:
                created_segment = Segment(id=seg_id, source_da=da, gold_msa=gold)
            except ValueError as exc:
                result.rejected.append(RejectedRow(row_num, "BadRow", f"row {row_num}: {exc}"))
                continue
            segment = created_segment

        existing = outputs.get((segment.id, system_id))
        if existing is not None:
            if existing.hypothesis != mt:
                result.rejected.append(RejectedRow(
                    row_num, "HypothesisMismatch",
                    f"row {row_num}: MT cell differs from the hypothesis already recorded "
                    f"for segment {segment.id!r} and system {system_id!r}"))
            else:
                result.warnings.append(
                    f"row {row_num}: output for segment {segment.id!r} and system "
                    f"{system_id!r} was already recorded (row ignored)")
            continue

        if created_segment is not None:
            by_text[(da, gold)] = created_segment
            taken_ids.add(created_segment.id)
            result.new_segments.append(created_segment)
        output = SystemOutput(segment_id=segment.id, system_id=system_id, hypothesis=mt)
        outputs[(segment.id, system_id)] = output
        result.new_outputs.append(output)

    if dry_run:
        return result
    for seg in result.new_segments:
        project.add_segment(seg)
    for out in result.new_outputs:
        project.add_output(out)
    return result


def export_sheet(
    project: Project,
    system_id: str,
    annotator_id: str,
    delimiter: str = "\t",
) -> str:
    """Render the authoritative annotations for one (system, annotator) pair.

    One row per annotated segment in project order; zero severities become
    empty cells; TOTAL is the SEGS value at two decimal places. Importing the
    exported sheet reproduces the same authoritative annotations.
    """
    if system_id not in project.system_ids():
        raise UnknownSystem(f"system {system_id!r} has no outputs in the project")
    if annotator_id not in project.annotators:
        raise UnknownAnnotator(f"annotator {annotator_id!r} is not registered")

    auth = authoritative_annotations(project)
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerow(HEADER)
    for seg in project.segments:
        ann = auth.get((annotator_id, seg.id, system_id))
        if ann is None:
            continue
        output = project.output_for(seg.id, system_id)
        hypothesis = output.hypothesis if output is not None else ""
        cells = [seg.source_da, seg.gold_msa, hypothesis]
        for col in SEVERITY_COLUMNS:
            sev = ann.severities[ErrorCategory(col)]
            cells.append("" if sev == 0 else str(int(sev)))
        cells.append(format_fraction(segs(ann, project.config), 2))
        writer.writerow(cells)
    return buf.getvalue()

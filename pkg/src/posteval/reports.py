"""Report documents: segment scores, severity distribution, error pattern, agreement.

Every report kind is built as a structured document (a plain dict with stable,
versioned field names under the "posteval-report/1" schema) and rendered from
that document into an aligned text table or delimiter-separated lines. All
three renderings therefore carry identical numbers, and identical inputs yield
byte-identical output.

Formatted values in the documents are strings produced by exact rational
arithmetic (scores at 2 decimals, kappa at 3, percentages as integers);
consumers display them verbatim rather than recomputing.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .agreement import AgreementTable, Dimension, MTCombine, agreement_table
from .model import CATEGORY_ORDER, ErrorCategory, Project, ScoringConfig
from .scoring import (
    Bucket,
    CategoryTotals,
    SegmentScore,
    SeverityDistribution,
    category_totals,
    format_fraction,
    round_half_up,
    segment_scores,
    severity_distribution,
)

REPORT_SCHEMA = "posteval-report/1"
REPORT_KINDS = ("scores", "severity", "pattern", "agreement")
REPORT_FORMATS = ("text", "delimited", "structured")

UNDEFINED_KAPPA = "n/a (degenerate)"


@dataclass(frozen=True)
class Report:
    kind: str
    doc: dict


def format_kappa(kappa: float | None) -> str:
    return UNDEFINED_KAPPA if kappa is None else f"{kappa:.3f}"


# -- builders (from aggregates, and from a project) ----------------------------

def scores_report_from(score_lists: Sequence[Sequence[SegmentScore]]) -> Report:
    systems = []
    for scores in score_lists:
        total = sum((s.segs for s in scores), Fraction(0))
        mean = total / len(scores) if scores else Fraction(0)
        systems.append({
            "system": scores[0].system_id if scores else "",
            "segments": [
                {"segment": s.segment_id, "segs": format_fraction(s.segs, 2),
                 "bucket": s.bucket.value}
                for s in scores
            ],
            "total": format_fraction(total, 2),
            "mean": format_fraction(mean, 2),
        })
    doc = {"schema": REPORT_SCHEMA, "kind": "scores", "systems": systems, "notes": []}
    return Report("scores", doc)


def severity_report_from(distributions: Sequence[SeverityDistribution]) -> Report:
    systems = []
    notes = []
    for dist in distributions:
        pct = dist.percentages()
        systems.append({
            "system": dist.system_id,
            "segments": dist.total_segments,
            "counts": {b.value: dist.counts[b] for b in Bucket},
            "percentages": {b.value: pct[b] for b in Bucket},
        })
        total_pct = sum(pct.values())
        if total_pct != 100:
            notes.append(
                f"percentages for {dist.system_id} sum to {total_pct}, "
                "not 100 (integer rounding)")
    doc = {"schema": REPORT_SCHEMA, "kind": "severity", "systems": systems, "notes": notes}
    return Report("severity", doc)


def pattern_report_from(totals_list: Sequence[CategoryTotals]) -> Report:
    systems = []
    notes = []
    for totals in totals_list:
        grand = totals.grand_total
        if grand > 0:
            shares = {cat: round_half_up(Fraction(100) * totals.totals[cat] / grand)
                      for cat in CATEGORY_ORDER}
            trm_gsmis = round_half_up(
                Fraction(100)
                * (totals.totals[ErrorCategory.TRM] + totals.totals[ErrorCategory.GSMIS])
                / grand)
        else:
            shares = {cat: 0 for cat in CATEGORY_ORDER}
            trm_gsmis = 0
            notes.append(f"{totals.system_id} has no errors; category shares are zero")
        systems.append({
            "system": totals.system_id,
            "totals": {cat.value: format_fraction(totals.totals[cat], 2)
                       for cat in CATEGORY_ORDER},
            "grand_total": format_fraction(grand, 2),
            "shares": {cat.value: shares[cat] for cat in CATEGORY_ORDER},
            "trm_gsmis_share": trm_gsmis,
        })
        share_sum = sum(shares.values())
        if grand > 0 and share_sum != 100:
            notes.append(
                f"category shares for {totals.system_id} sum to {share_sum}, "
                "not 100 (integer rounding)")
    doc = {
        "schema": REPORT_SCHEMA, "kind": "pattern",
        "categories": [cat.value for cat in CATEGORY_ORDER],
        "systems": systems, "notes": notes,
    }
    return Report("pattern", doc)


def agreement_report_from(table: AgreementTable) -> Report:
    systems = []
    for row in table.rows:
        if row.system_id not in systems:
            systems.append(row.system_id)
    cells = [
        {
            "dimension": row.dimension.value,
            "system": row.system_id,
            "kappa": format_kappa(row.kappa),
            "band": row.band,
            "items": row.n_items,
        }
        for row in table.rows
    ]
    present = {row.dimension for row in table.rows}
    doc = {
        "schema": REPORT_SCHEMA, "kind": "agreement",
        "annotators": list(table.annotators),
        "systems": systems,
        "dimensions": [d.value for d in Dimension if d in present],
        "cells": cells,
        "excluded": [{"system": s, "segment": seg} for s, seg in table.excluded],
        "notes": [],
    }
    return Report("agreement", doc)


def scores_report(project: Project, cfg: ScoringConfig) -> Report:
    return scores_report_from(
        [segment_scores(project, system_id, cfg) for system_id in project.system_ids()])


def severity_report(project: Project, cfg: ScoringConfig) -> Report:
    return severity_report_from(
        [severity_distribution(project, system_id, cfg) for system_id in project.system_ids()])


def pattern_report(project: Project, cfg: ScoringConfig) -> Report:
    return pattern_report_from(
        [category_totals(project, system_id, cfg) for system_id in project.system_ids()])


def agreement_report(project: Project, cfg: ScoringConfig,
                     mt_combine: MTCombine = MTCombine.MAX) -> Report:
    return agreement_report_from(agreement_table(project, cfg, mt_combine))


def build_report(kind: str, project: Project, cfg: ScoringConfig) -> Report:
    builders = {
        "scores": scores_report,
        "severity": severity_report,
        "pattern": pattern_report,
        "agreement": agreement_report,
    }
    if kind not in builders:
        raise ValueError(f"unknown report kind {kind!r}; expected one of {REPORT_KINDS}")
    return builders[kind](project, cfg)


# -- rendering -----------------------------------------------------------------

def _aligned(headers: Sequence[str], rows: Sequence[Sequence[str]],
             aligns: str) -> list[str]:
    """Fixed-width table lines; aligns is one 'l'/'r' per column."""
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))

    def fit(cells):
        parts = []
        for i, cell in enumerate(cells):
            parts.append(cell.rjust(widths[i]) if aligns[i] == "r" else cell.ljust(widths[i]))
        return "  ".join(parts).rstrip()

    return [fit(headers), fit(["-" * w for w in widths])] + [fit(r) for r in rows]


def _finish(lines: list[str], notes: Sequence[str]) -> str:
    if notes:
        lines.append("")
        lines.extend(f"Note: {n}" for n in notes)
    return "\n".join(lines) + "\n"


def _text_scores(doc: dict) -> str:
    lines = ["Segment scores (SEGS)", ""]
    for i, system in enumerate(doc["systems"]):
        if i:
            lines.append("")
        lines.append(f"System: {system['system']}")
        rows = [[s["segment"], s["segs"], s["bucket"]] for s in system["segments"]]
        lines.extend(_aligned(["Segment", "SEGS", "Bucket"], rows, "lrl"))
        lines.append(f"Total: {system['total']}  Mean: {system['mean']}")
    return _finish(lines, doc["notes"])


def _text_severity(doc: dict) -> str:
    headers = ["System", "Segments", "NoEdit", "Minor", "Major",
               "NoEdit%", "Minor%", "Major%"]
    rows = []
    for system in doc["systems"]:
        counts, pct = system["counts"], system["percentages"]
        rows.append([
            system["system"], str(system["segments"]),
            str(counts["NoEdit"]), str(counts["Minor"]), str(counts["Major"]),
            str(pct["NoEdit"]), str(pct["Minor"]), str(pct["Major"]),
        ])
    lines = ["Severity distribution (segments per bucket)", ""]
    lines.extend(_aligned(headers, rows, "lrrrrrrr"))
    return _finish(lines, doc["notes"])


def _text_pattern(doc: dict) -> str:
    cats = doc["categories"]
    headers = ["System", *cats, "Total", "TRM+GSMIS%"]
    rows = []
    for system in doc["systems"]:
        rows.append([
            system["system"],
            *[system["totals"][c] for c in cats],
            system["grand_total"],
            str(system["trm_gsmis_share"]),
        ])
    lines = ["Error pattern (accumulated category scores; ADP weighted)", ""]
    lines.extend(_aligned(headers, rows, "l" + "r" * (len(cats) + 2)))
    return _finish(lines, doc["notes"])


def _text_agreement(doc: dict) -> str:
    cell_by_key = {(c["dimension"], c["system"]): c for c in doc["cells"]}
    headers = ["Dimension", *doc["systems"]]
    rows = []
    for dim in doc["dimensions"]:
        row = [dim]
        for system in doc["systems"]:
            cell = cell_by_key[(dim, system)]
            label = cell["kappa"]
            if cell["band"] is not None:
                label += f" ({cell['band']})"
            row.append(label)
        rows.append(row)
    lines = [
        "Inter-annotator agreement (quadratic weighted kappa)",
        "Annotators: " + ", ".join(doc["annotators"]),
        "",
    ]
    lines.extend(_aligned(headers, rows, "l" * (1 + len(doc["systems"]))))
    if doc["excluded"]:
        lines.append("")
        lines.append(f"Excluded one-sided items: {len(doc['excluded'])}")
    return _finish(lines, doc["notes"])


def _rows_for_delimited(doc: dict) -> tuple[list[str], list[list[str]]]:
    kind = doc["kind"]
    if kind == "scores":
        header = ["system", "segment", "segs", "bucket"]
        rows = [[system["system"], s["segment"], s["segs"], s["bucket"]]
                for system in doc["systems"] for s in system["segments"]]
    elif kind == "severity":
        header = ["system", "segments", "noedit", "minor", "major",
                  "noedit_pct", "minor_pct", "major_pct"]
        rows = [[system["system"], str(system["segments"]),
                 str(system["counts"]["NoEdit"]), str(system["counts"]["Minor"]),
                 str(system["counts"]["Major"]), str(system["percentages"]["NoEdit"]),
                 str(system["percentages"]["Minor"]), str(system["percentages"]["Major"])]
                for system in doc["systems"]]
    elif kind == "pattern":
        cats = doc["categories"]
        header = ["system", *[c.lower() for c in cats], "grand_total", "trm_gsmis_share"]
        rows = [[system["system"], *[system["totals"][c] for c in cats],
                 system["grand_total"], str(system["trm_gsmis_share"])]
                for system in doc["systems"]]
    elif kind == "agreement":
        header = ["dimension", "system", "kappa", "band", "items"]
        rows = [[c["dimension"], c["system"], c["kappa"],
                 c["band"] if c["band"] is not None else "", str(c["items"])]
                for c in doc["cells"]]
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return header, rows


def render(report: Report, fmt: str = "text") -> str:
    """Render a report document; always ends with exactly one newline."""
    if fmt == "structured":
        return json.dumps(report.doc, indent=2, ensure_ascii=False) + "\n"
    if fmt == "delimited":
        header, rows = _rows_for_delimited(report.doc)
        buf = io.StringIO()
        writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt == "text":
        renderer = {
            "scores": _text_scores,
            "severity": _text_severity,
            "pattern": _text_pattern,
            "agreement": _text_agreement,
        }[report.kind]
        return renderer(report.doc)
    raise ValueError(f"unknown format {fmt!r}; expected one of {REPORT_FORMATS}")
